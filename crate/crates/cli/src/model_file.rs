//! JSON model files: raw serde layout and resolution into validated objects.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gptk::channel::{markov_dual, LinearMap, MarkovKernel};
use gptk::composite::{pr_box, BilinearRule, JointWeight};
use gptk::logic::{boolean_algebra, EffectAlgebraTable};
use gptk::modj::{boolean_testspace, complete_catalog, Catalog, Observable};
use gptk::rational::{parse_rational, Rational, Vector};
use gptk::systems;
use gptk::{Error, Model, OrderUnitSpace, Outcome, Result, State, TestSpace, ValuedWeight};
use serde::Deserialize;
use serde_json::Value;

type Section<T> = BTreeMap<String, T>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    spaces: Section<RawSpace>,
    #[serde(default)]
    effects: Section<Vec<Value>>,
    #[serde(default)]
    testspaces: Section<RawTestSpace>,
    #[serde(default)]
    models: Section<RawModel>,
    #[serde(default)]
    states: Section<RawState>,
    #[serde(default)]
    valued_weights: Section<RawValuedWeight>,
    #[serde(default)]
    catalogs: Section<RawCatalog>,
    #[serde(default)]
    kernels: Section<RawKernel>,
    #[serde(default)]
    channels: Section<RawChannel>,
    #[serde(default)]
    bilinear_rules: Section<RawRule>,
    #[serde(default)]
    effect_algebras: Section<RawEffectAlgebra>,
    #[serde(default)]
    joint_weights: Section<RawJoint>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    builtin: Option<String>,
    classical: Option<usize>,
    generators: Option<Vec<Vec<Value>>>,
    unit: Option<Vec<Value>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTestSpace {
    tests: Option<Vec<Vec<String>>>,
    builtin: Option<String>,
    boolean: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    testspace: String,
    /// `"full"` or a list of outcome -> value maps (missing outcomes are 0).
    states: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    space: String,
    functional: Vec<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValuedWeight {
    space: String,
    testspace: String,
    values: BTreeMap<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    space: Option<String>,
    #[serde(default)]
    observables: Vec<BTreeMap<String, Value>>,
    realize: Option<String>,
    #[serde(default)]
    complete: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    matrix: Vec<Vec<Value>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    domain: Option<String>,
    codomain: Option<String>,
    matrix: Option<Vec<Vec<Value>>>,
    kernel_dual: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    left: Option<String>,
    right: Option<String>,
    kind: Option<String>,
    composite: Option<String>,
    matrix: Option<Vec<Vec<Value>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEffectAlgebra {
    chain: Option<usize>,
    boolean: Option<usize>,
    labels: Option<Vec<String>>,
    zero: Option<String>,
    one: Option<String>,
    #[serde(default)]
    sums: Vec<[String; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    left: String,
    right: String,
    builtin: Option<String>,
    values: Option<BTreeMap<String, BTreeMap<String, Value>>>,
}

/// A bilinear rule with the names of its factor spaces.
#[derive(Debug, Clone)]
pub struct NamedRule {
    pub left: String,
    pub right: String,
    pub rule: BilinearRule,
}

/// A joint weight with the names of its factor models.
#[derive(Debug, Clone)]
pub struct NamedJoint {
    pub left: String,
    pub right: String,
    pub weight: JointWeight,
}

/// Every object of a model file, validated.
#[derive(Debug, Clone, Default)]
pub struct ModelFile {
    pub spaces: Section<OrderUnitSpace>,
    pub effects: Section<Vector>,
    pub testspaces: Section<TestSpace>,
    pub models: Section<Model>,
    pub states: Section<(String, State)>,
    pub valued_weights: Section<ValuedWeight>,
    pub catalogs: Section<Catalog>,
    pub kernels: Section<MarkovKernel>,
    pub channels: Section<LinearMap>,
    pub bilinear_rules: Section<NamedRule>,
    pub effect_algebras: Section<EffectAlgebraTable>,
    pub joint_weights: Section<NamedJoint>,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

/// Strings `"p/q"` or integers; floating-point numbers are rejected.
pub fn rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => err(format!("floating-point value {n} rejected; write it as a string \"p/q\"")),
        },
        other => err(format!("expected a rational, found {other}")),
    }
}

pub fn vector(vs: &[Value]) -> Result<Vector> {
    vs.iter().map(rational).collect()
}

fn matrix(rows: &[Vec<Value>]) -> Result<Vec<Vector>> {
    rows.iter().map(|r| vector(r)).collect()
}

fn lookup<'a, T>(section: &'a Section<T>, kind: &str, name: &str) -> Result<&'a T> {
    section
        .get(name)
        .ok_or_else(|| Error::Input(format!("unknown {kind} {name:?}")))
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        ModelFile::parse(&text)
    }

    /// Resolves every entry; all violations are collected before failing.
    pub fn parse(text: &str) -> Result<ModelFile> {
        let raw: RawFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed model file: {e}")))?;
        let mut file = ModelFile::default();
        let mut violations = Vec::new();
        macro_rules! resolve {
            ($section:ident, $kind:literal, $f:expr) => {
                for (name, item) in &raw.$section {
                    match $f(&file, item) {
                        Ok(v) => {
                            file.$section.insert(name.clone(), v);
                        }
                        Err(e) => violations.push(format!("{}.{name}: {}", $kind, message(&e))),
                    }
                }
            };
        }
        resolve!(spaces, "spaces", resolve_space);
        resolve!(effects, "effects", |_: &ModelFile, v: &Vec<Value>| vector(v));
        resolve!(testspaces, "testspaces", resolve_testspace);
        resolve!(models, "models", resolve_model);
        resolve!(states, "states", resolve_state);
        resolve!(valued_weights, "valued_weights", resolve_valued_weight);
        resolve!(catalogs, "catalogs", resolve_catalog);
        resolve!(kernels, "kernels", |_: &ModelFile, k: &RawKernel| MarkovKernel::new(matrix(&k.matrix)?));
        resolve!(channels, "channels", resolve_channel);
        resolve!(bilinear_rules, "bilinear_rules", resolve_rule);
        resolve!(effect_algebras, "effect_algebras", resolve_effect_algebra);
        resolve!(joint_weights, "joint_weights", resolve_joint);
        if violations.is_empty() {
            Ok(file)
        } else {
            err(violations.join("\n"))
        }
    }

    pub fn space(&self, name: &str) -> Result<&OrderUnitSpace> {
        lookup(&self.spaces, "space", name)
    }

    pub fn testspace(&self, name: &str) -> Result<&TestSpace> {
        lookup(&self.testspaces, "test space", name)
    }

    pub fn model(&self, name: &str) -> Result<&Model> {
        lookup(&self.models, "model", name)
    }

    pub fn state(&self, name: &str) -> Result<&(String, State)> {
        lookup(&self.states, "state", name)
    }

    pub fn valued_weight(&self, name: &str) -> Result<&ValuedWeight> {
        lookup(&self.valued_weights, "valued weight", name)
    }

    pub fn catalog(&self, name: &str) -> Result<&Catalog> {
        lookup(&self.catalogs, "catalog", name)
    }

    pub fn kernel(&self, name: &str) -> Result<&MarkovKernel> {
        lookup(&self.kernels, "kernel", name)
    }

    pub fn channel(&self, name: &str) -> Result<&LinearMap> {
        lookup(&self.channels, "channel", name)
    }

    pub fn rule(&self, name: &str) -> Result<&NamedRule> {
        lookup(&self.bilinear_rules, "bilinear rule", name)
    }

    pub fn effect_algebra(&self, name: &str) -> Result<&EffectAlgebraTable> {
        lookup(&self.effect_algebras, "effect algebra", name)
    }

    pub fn joint_weight(&self, name: &str) -> Result<&NamedJoint> {
        lookup(&self.joint_weights, "joint weight", name)
    }

    /// Section sizes in file order.
    pub fn counts(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("spaces", self.spaces.len()),
            ("effects", self.effects.len()),
            ("testspaces", self.testspaces.len()),
            ("models", self.models.len()),
            ("states", self.states.len()),
            ("valued_weights", self.valued_weights.len()),
            ("catalogs", self.catalogs.len()),
            ("kernels", self.kernels.len()),
            ("channels", self.channels.len()),
            ("bilinear_rules", self.bilinear_rules.len()),
            ("effect_algebras", self.effect_algebras.len()),
            ("joint_weights", self.joint_weights.len()),
        ]
    }

    /// An effect given inline as a vector or by name from the effect table.
    fn effect_value(&self, v: &Value) -> Result<Vector> {
        match v {
            Value::String(name) => lookup(&self.effects, "effect", name).cloned(),
            Value::Array(items) => vector(items),
            other => err(format!("expected an effect vector or name, found {other}")),
        }
    }
}

pub fn message(e: &Error) -> String {
    match e {
        Error::Input(m) | Error::Structural(m) | Error::Resource(m) | Error::Undefined(m) | Error::Internal(m) => {
            m.clone()
        }
    }
}

fn resolve_space(_: &ModelFile, s: &RawSpace) -> Result<OrderUnitSpace> {
    match (&s.builtin, s.classical, &s.generators, &s.unit) {
        (Some(b), None, None, None) => match b.as_str() {
            "bit" => Ok(systems::bit()),
            "gbit" | "square_bit" => Ok(systems::gbit()),
            "trivial" => Ok(systems::trivial()),
            other => err(format!("unknown builtin space {other:?}")),
        },
        (None, Some(n), None, None) if n > 0 => Ok(systems::classical(n)),
        (None, None, Some(g), Some(u)) => OrderUnitSpace::new(matrix(g)?, vector(u)?),
        _ => err("give exactly one of builtin, classical, or generators with unit"),
    }
}

fn resolve_testspace(_: &ModelFile, t: &RawTestSpace) -> Result<TestSpace> {
    match (&t.tests, &t.builtin, t.boolean) {
        (Some(tests), None, None) => TestSpace::new(
            tests
                .iter()
                .map(|e| e.iter().map(|x| Outcome::atom(x.as_str())).collect())
                .collect(),
        ),
        (None, Some(b), None) => match b.as_str() {
            "grid" => Ok(systems::grid()),
            "triangle" => Ok(systems::triangle()),
            "two_binary_tests" => Ok(systems::two_binary_tests()),
            other => err(format!("unknown builtin test space {other:?}")),
        },
        (None, None, Some(n)) => boolean_testspace(n),
        _ => err("give exactly one of tests, builtin, or boolean"),
    }
}

/// Outcome-keyed values; keys must be outcomes, missing outcomes are 0.
fn outcome_vector(ts: &TestSpace, values: &serde_json::Map<String, Value>) -> Result<Vector> {
    let mut out = vec![Rational::from_integer(0.into()); ts.num_outcomes()];
    for (k, v) in values {
        let id = ts
            .id(&Outcome::atom(k.as_str()))
            .ok_or_else(|| Error::Input(format!("unknown outcome {k:?}")))?;
        out[id] = rational(v)?;
    }
    Ok(out)
}

fn resolve_model(file: &ModelFile, m: &RawModel) -> Result<Model> {
    let ts = file.testspace(&m.testspace)?.clone();
    match &m.states {
        Value::String(s) if s == "full" => Model::full(ts),
        Value::Array(items) => {
            let states = items
                .iter()
                .map(|s| match s {
                    Value::Object(map) => outcome_vector(&ts, map),
                    other => err(format!("expected an outcome -> value map, found {other}")),
                })
                .collect::<Result<Vec<_>>>()?;
            Model::new(ts, states)
        }
        _ => err("states must be \"full\" or a list of outcome -> value maps"),
    }
}

fn resolve_state(file: &ModelFile, s: &RawState) -> Result<(String, State)> {
    let space = file.space(&s.space)?;
    Ok((s.space.clone(), space.state(vector(&s.functional)?)?))
}

fn resolve_valued_weight(file: &ModelFile, w: &RawValuedWeight) -> Result<ValuedWeight> {
    let space = file.space(&w.space)?;
    let ts = file.testspace(&w.testspace)?;
    let mut values = Vec::with_capacity(ts.num_outcomes());
    for x in ts.outcomes() {
        let key = x.to_string();
        let v = w
            .values
            .get(&key)
            .ok_or_else(|| Error::Input(format!("no value for outcome {key:?}")))?;
        values.push(file.effect_value(v)?);
    }
    if let Some(extra) = w.values.keys().find(|k| ts.id(&Outcome::atom(k.as_str())).is_none()) {
        return err(format!("unknown outcome {extra:?}"));
    }
    ValuedWeight::new(space.clone(), ts.clone(), values)
}

fn resolve_catalog(file: &ModelFile, c: &RawCatalog) -> Result<Catalog> {
    let cat = match (&c.realize, &c.space) {
        (Some(f), None) if c.observables.is_empty() => systems::realized_catalog(file.valued_weight(f)?)?,
        (None, Some(s)) => {
            let space = file.space(s)?;
            let observables = c
                .observables
                .iter()
                .map(|o| {
                    let pairs = o
                        .iter()
                        .map(|(i, v)| Ok((Outcome::atom(i.as_str()), file.effect_value(v)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Observable::new(space, pairs)
                })
                .collect::<Result<Vec<_>>>()?;
            Catalog::new(space.clone(), observables)?
        }
        _ => return err("give either space with observables, or realize"),
    };
    if c.complete {
        complete_catalog(&cat)
    } else {
        Ok(cat)
    }
}

fn resolve_channel(file: &ModelFile, c: &RawChannel) -> Result<LinearMap> {
    match (&c.kernel_dual, &c.domain, &c.codomain, &c.matrix) {
        (Some(k), None, None, None) => Ok(markov_dual(file.kernel(k)?)),
        (None, Some(d), Some(cd), Some(m)) => {
            LinearMap::new(file.space(d)?.clone(), file.space(cd)?.clone(), matrix(m)?)
        }
        _ => err("give either kernel_dual, or domain, codomain and matrix"),
    }
}

fn resolve_rule(file: &ModelFile, r: &RawRule) -> Result<NamedRule> {
    let rule = match (&r.kind, &r.left, &r.right, &r.composite, &r.matrix) {
        (Some(k), None, None, None, None) if k == "multiplication" => {
            return Ok(NamedRule {
                left: String::new(),
                right: String::new(),
                rule: BilinearRule::multiplication(),
            })
        }
        (Some(k), Some(a), Some(b), None, None) => {
            let (sa, sb) = (file.space(a)?, file.space(b)?);
            match k.as_str() {
                "min" => BilinearRule::min_rule(sa, sb)?,
                "max" => BilinearRule::max_rule(sa, sb)?,
                other => return err(format!("unknown rule kind {other:?}")),
            }
        }
        (None, Some(a), Some(b), Some(g), Some(m)) => BilinearRule::new(
            file.space(a)?.clone(),
            file.space(b)?.clone(),
            file.space(g)?.clone(),
            matrix(m)?,
        )?,
        _ => return err("give kind (min, max, multiplication) or left, right, composite and matrix"),
    };
    Ok(NamedRule {
        left: r.left.clone().unwrap_or_default(),
        right: r.right.clone().unwrap_or_default(),
        rule,
    })
}

fn resolve_effect_algebra(_: &ModelFile, e: &RawEffectAlgebra) -> Result<EffectAlgebraTable> {
    match (e.chain, e.boolean, &e.labels) {
        (Some(n), None, None) if n > 0 => Ok(EffectAlgebraTable::chain(n)),
        (None, Some(k), None) => Ok(boolean_algebra(k)),
        (None, None, Some(labels)) => {
            let pos = |name: &Option<String>, what: &str| -> Result<usize> {
                let name = name.as_deref().ok_or_else(|| Error::Input(format!("{what} is required")))?;
                labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| Error::Input(format!("{what} {name:?} is not a label")))
            };
            let (zero, one) = (pos(&e.zero, "zero")?, pos(&e.one, "one")?);
            let n = labels.len();
            let mut table = vec![vec![None; n]; n];
            for (a, row) in table.iter_mut().enumerate() {
                row[zero] = Some(a);
            }
            for (a, cell) in table[zero].iter_mut().enumerate() {
                *cell = Some(a);
            }
            for [a, b, c] in &e.sums {
                let idx = |s: &String| {
                    labels
                        .iter()
                        .position(|l| l == s)
                        .ok_or_else(|| Error::Input(format!("{s:?} is not a label")))
                };
                let (a, b, c) = (idx(a)?, idx(b)?, idx(c)?);
                table[a][b] = Some(c);
                table[b][a] = Some(c);
            }
            EffectAlgebraTable::new(labels.clone(), zero, one, table)
        }
        _ => err("give exactly one of chain, boolean, or labels with zero, one and sums"),
    }
}

fn resolve_joint(file: &ModelFile, j: &RawJoint) -> Result<NamedJoint> {
    let (ma, mb) = (file.model(&j.left)?, file.model(&j.right)?);
    let weight = match (&j.builtin, &j.values) {
        (Some(b), None) if b == "pr_box" => {
            let two = systems::two_binary_tests();
            if ma.testspace() != &two || mb.testspace() != &two {
                return err("pr_box needs both models on the two-binary-test space");
            }
            pr_box()
        }
        (None, Some(values)) => {
            let (m, n) = (ma.testspace(), mb.testspace());
            let mut table = vec![vec![Rational::from_integer(0.into()); n.num_outcomes()]; m.num_outcomes()];
            for (x, row) in values {
                let xi = m
                    .id(&Outcome::atom(x.as_str()))
                    .ok_or_else(|| Error::Input(format!("unknown outcome {x:?}")))?;
                let map: serde_json::Map<String, Value> = row.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                table[xi] = outcome_vector(n, &map)?;
            }
            JointWeight::new(m, n, table)?
        }
        _ => return err("give either builtin \"pr_box\" or values"),
    };
    Ok(NamedJoint {
        left: j.left.clone(),
        right: j.right.clone(),
        weight,
    })
}
