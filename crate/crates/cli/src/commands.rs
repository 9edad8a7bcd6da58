//! One function per subcommand; each fills a [`Report`].

use gptk::channel::{induced_morphism, markov_compose, markov_dual, InducedMorphism, LinearMap};
use gptk::composite::{
    composite_flags_full, cone_sandwich_check, is_joint_state, is_nonsignalling, left_marginal, max_cone_contains,
    min_cone_membership, monoidal_map, monoidality_check, right_marginal, separability,
};
use gptk::dacey::{dacey_cover, derandomize, describe_cell, simulate_check, DaceyCover};
use gptk::logic::{
    algebraicity_transfer_check, indexed_fragment, complementarity_check, logic_of, star_logic_iso_check, star_product,
    unit_chain, EffectAlgebraTable,
};
use gptk::modj::{build_modj, completion_audit, lift_state};
use gptk::rational::{fmt_vector, Vector};
use gptk::vweight::factorization_check;
use gptk::{Error, Result, TestSpace};
use num_traits::Zero;
use serde_json::json;

use crate::model_file::{vector, ModelFile};
use crate::report::Report;

fn tests_listing(r: &mut Report, ts: &TestSpace) {
    r.count("outcomes", ts.num_outcomes());
    r.count("tests", ts.tests().len());
    for (i, _) in ts.tests().iter().enumerate() {
        let os = ts.test_outcomes(i);
        r.outcomes(format!("test {i}"), &os);
    }
}

fn vertex_listing(r: &mut Report, label: &str, vertices: &[Vector]) {
    r.count(format!("{label} count"), vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        r.vector(format!("{label} {i}"), v);
    }
}

pub fn validate(file: &ModelFile, r: &mut Report) -> Result<()> {
    r.section("sections");
    for (name, n) in file.counts() {
        r.count(name, n);
    }
    r.check("every entry resolves and satisfies its invariants", true);
    Ok(())
}

pub fn states(file: &ModelFile, space: &str, r: &mut Report) -> Result<()> {
    let s = file.space(space)?;
    r.section(format!("space {space}"));
    r.count("dimension", s.dim());
    r.vector("unit", s.unit());
    let gens = s.extreme_generators();
    vertex_listing(r, "extreme ray", &gens);
    r.section("state polytope");
    let vertices: Vec<Vector> = s.state_polytope_vertices()?.into_iter().map(|v| v.0).collect();
    vertex_listing(r, "vertex", &vertices);
    let mut all_states = true;
    for v in &vertices {
        all_states &= s.is_state(v)?;
    }
    r.check("every vertex is a state", all_states);
    r.check("unit is an order unit", s.is_order_unit(s.unit())?);
    Ok(())
}

pub fn weights(file: &ModelFile, testspace: &str, r: &mut Report) -> Result<()> {
    let ts = file.testspace(testspace)?;
    r.section(format!("test space {testspace}"));
    tests_listing(r, ts);
    r.flag("algebraic", ts.is_algebraic()?);
    r.section("weight polytope");
    let vertices = ts.weight_polytope_vertices()?;
    vertex_listing(r, "vertex", &vertices);
    let mut all_weights = true;
    for v in &vertices {
        all_weights &= ts.is_probability_weight(v)?;
    }
    r.check("every vertex is a probability weight", all_weights);
    let mut valued: Vec<(&String, bool)> = Vec::new();
    for (name, f) in &file.valued_weights {
        if f.testspace() == ts {
            valued.push((name, factorization_check(f)?));
        }
    }
    for (name, ok) in valued {
        r.check(format!("valued weight {name} factors through the weight model"), ok);
    }
    Ok(())
}

pub fn modj(file: &ModelFile, space: &str, catalog: &str, audit: bool, r: &mut Report) -> Result<()> {
    let s = file.space(space)?;
    let c = file.catalog(catalog)?;
    if !c.space().same_as(s) {
        return Err(Error::Input(format!("catalog {catalog:?} is not over space {space:?}")));
    }
    let m = build_modj(c)?;
    r.section(format!("fragment of {catalog}"));
    r.count("observables", c.observables().len());
    tests_listing(r, m.testspace());
    r.section("lifted states");
    let lifts: Vec<Vector> = m.model.states().to_vec();
    vertex_listing(r, "lift", &lifts);
    let mut lifts_ok = true;
    for phi in &m.vertices {
        lifts_ok &= m.testspace().is_probability_weight(&lift_state(m.testspace(), phi)?)?;
    }
    r.check("every lifted state is a probability weight", lifts_ok);
    if audit {
        let report = completion_audit(c)?;
        r.section("binary completion audit");
        r.flag("closed", report.closed);
        r.count("missing completions", report.missing.len());
        for (i, miss) in report.missing.iter().enumerate() {
            let text = format!("{} and {} lack a completion of {}", miss.first, miss.second, fmt_vector(&miss.effect));
            let value = json!({
                "first": r.effects.token(&miss.first),
                "second": r.effects.token(&miss.second),
                "effect": crate::report::vector_json(&miss.effect),
            });
            r.put(format!("missing {i}"), text, value);
        }
        r.rational("max gap", &report.max_gap);
        r.flag("every weight vertex extends to a state", report.extension_ok);
        r.count("non-extending vertices", report.non_extending.len());
        if report.closed {
            r.check("closed catalog: same-effect outcomes get equal weights", report.max_gap.is_zero());
            r.check("closed catalog: every weight vertex extends to a state", report.extension_ok);
        }
    }
    Ok(())
}

fn algebra_listing(r: &mut Report, e: &EffectAlgebraTable) {
    r.count("elements", e.len());
    r.put("labels", e.labels().join(", "), json!(e.labels()));
    r.flag("orthoalgebra", e.is_orthoalgebra());
    r.flag("boolean", e.is_boolean());
}

pub struct LogicArgs<'a> {
    pub star: Option<(&'a str, &'a str)>,
    pub iso_check: bool,
    pub space: Option<&'a str>,
    pub chain: usize,
}

pub fn logic(file: &ModelFile, testspace: &str, args: LogicArgs<'_>, r: &mut Report) -> Result<()> {
    let ts = file.testspace(testspace)?;
    r.section(format!("test space {testspace}"));
    r.count("outcomes", ts.num_outcomes());
    r.count("tests", ts.tests().len());
    let algebraic = ts.is_algebraic()?;
    r.flag("algebraic", algebraic);
    if let Some((a, b)) = ts.algebraicity_witness()? {
        r.text("witness", format!("{} and {} are perspective with different complements", ts.fmt_event(&a), ts.fmt_event(&b)));
    }
    if algebraic {
        let l = logic_of(ts)?;
        r.section("logic");
        r.count("classes", l.classes.len());
        algebra_listing(r, &l.algebra);
        r.check("the logic is an orthoalgebra", l.algebra.is_orthoalgebra());
    }
    if let Some((ln, mn)) = args.star {
        let (la, ma) = (file.effect_algebra(ln)?, file.effect_algebra(mn)?);
        let p = star_product(la, ma)?;
        r.section(format!("{ln} * {mn}"));
        algebra_listing(r, &p.table);
        r.check("star product projections are homomorphisms", p.projections_are_homomorphisms(la, ma));
        let onto = p.projections_are_onto(la, ma);
        if (la.len() == 2) == (ma.len() == 2) {
            r.check("star product projections are onto", onto);
        } else {
            r.flag("projections onto", onto);
        }
    }
    if args.iso_check {
        let space_name = args
            .space
            .ok_or_else(|| Error::Input("--iso-check needs --space".into()))?;
        let s = file.space(space_name)?;
        let effects = unit_chain(s, args.chain);
        let fragment = indexed_fragment(s, ts, &effects)?;
        r.section(format!("fragment over {space_name} with the unit chain of length {}", args.chain));
        r.count("outcomes", fragment.num_outcomes());
        r.count("tests", fragment.tests().len());
        let l2 = complementarity_check(s, ts, &fragment)?;
        r.count("events", l2.events);
        r.count("event pairs checked", l2.pairs_checked);
        r.count("complementarity mismatches", l2.violations.len());
        r.check("complementarity matches index complementarity plus effect totals", l2.violations.is_empty());
        r.check("fragment is algebraic exactly when the indexing space is", algebraicity_transfer_check(s, ts, &effects)?);
        if algebraic {
            let iso = star_logic_iso_check(s, ts, &effects)?;
            r.count("fragment logic classes", iso.fragment_classes);
            r.count("star product elements", iso.product_classes);
            r.flag("canonical map is an isomorphism", iso.canonical_map_ok);
            r.check("fragment logic is isomorphic to the star product", iso.isomorphic);
            r.check("class counts agree", iso.fragment_classes == iso.product_classes);
        }
    }
    Ok(())
}

fn morphism_listing(r: &mut Report, m: &InducedMorphism) {
    r.count("source outcomes", m.source.num_outcomes());
    r.count("target outcomes", m.target.num_outcomes());
    r.count("dropped outcomes", m.dropped.len());
    for (i, (x, y)) in m.outcome_table().into_iter().enumerate() {
        let text = match &y {
            Some(y) => format!("{x} -> {y}"),
            None => format!("{x} -> dropped"),
        };
        let value = json!([r.effects.token(&x), y.as_ref().map(|y| r.effects.token(y))]);
        r.put(format!("map {i}"), text, value);
    }
}

pub fn channel(file: &ModelFile, name: &str, induce: Option<&str>, r: &mut Report) -> Result<()> {
    let phi = file.channel(name)?;
    r.section(format!("map {name}"));
    r.count("domain dimension", phi.domain().dim());
    r.count("codomain dimension", phi.codomain().dim());
    r.matrix("matrix", phi.matrix());
    let process = phi.is_process()?;
    let is_channel = phi.is_channel()?;
    r.flag("positive", phi.is_positive()?);
    r.flag("process", process);
    r.flag("channel", is_channel);
    if process {
        let unit_image = phi.apply(phi.domain().unit());
        if gptk::linalg::is_zero(&unit_image) {
            r.text("range", "the unit maps to 0");
        } else {
            let restricted = phi.restrict_to_sub_ous()?;
            r.vector("unit image", &unit_image);
            r.count("range space dimension", restricted.sub.space.dim());
            r.check("corestriction to the unit image is a channel", restricted.map.is_channel()?);
        }
    }
    if let Some(cat) = induce {
        let c = file.catalog(cat)?;
        if !is_channel {
            return Err(Error::Input(format!("{name} is not a channel; induced morphisms need one")));
        }
        let m = induced_morphism(phi, c)?;
        r.section(format!("induced morphism on {cat}"));
        morphism_listing(r, &m);
        r.flag("locally injective", m.locally_injective);
        r.check("induced map sends tests onto tests", m.test_preserving);
        let id = induced_morphism(&LinearMap::identity(phi.domain()), c)?;
        let identity_ok = id.map.iter().enumerate().all(|(x, y)| *y == Some(x)) && id.dropped.is_empty();
        r.check("identity channel induces the identity", identity_ok);
        let target_model = build_modj(&m.image_catalog)?;
        let mut natural = true;
        for psi in &target_model.vertices {
            let pulled = m.pullback(&lift_state(&m.target, psi)?);
            natural &= pulled == lift_state(&m.source, &phi.pull_state(psi))?;
        }
        r.check("pulling back lifted states matches lifting pulled-back states", natural);
    }
    Ok(())
}

pub fn kernel_compose(file: &ModelFile, k: &str, j: &str, r: &mut Report) -> Result<()> {
    let (kk, jj) = (file.kernel(k)?, file.kernel(j)?);
    let composed = markov_compose(jj, kk)?;
    r.section(format!("{j} after {k}"));
    r.matrix(k, kk.matrix());
    r.matrix(j, jj.matrix());
    r.matrix("composite", composed.matrix());
    let (dk, dj, dc) = (markov_dual(kk), markov_dual(jj), markov_dual(&composed));
    r.section("duals");
    r.matrix("dual of composite", dc.matrix());
    let reversed = dk.after(&dj)?;
    r.matrix("dual of k after dual of j", reversed.matrix());
    r.check("dual of the composite is the reversed composite of duals", dc.matrix() == reversed.matrix());
    r.check(format!("dual of {k} is a channel"), dk.is_channel()?);
    r.check(format!("dual of {j} is a channel"), dj.is_channel()?);
    Ok(())
}

pub struct ComposeArgs {
    pub check_monoidality: bool,
    pub flags: bool,
}

pub fn compose(file: &ModelFile, rule: &str, ca: &str, cb: &str, args: ComposeArgs, r: &mut Report) -> Result<()> {
    let named = file.rule(rule)?;
    let (a, b) = (file.catalog(ca)?, file.catalog(cb)?);
    let g = &named.rule;
    r.section(format!("rule {rule}"));
    r.count("left dimension", g.left().dim());
    r.count("right dimension", g.right().dim());
    r.count("composite dimension", g.composite().dim());
    r.count("composite extreme rays", g.composite().extreme_generators().len());
    r.check(
        "composite cone lies between the min and max tensor cones",
        cone_sandwich_check(g.left(), g.right(), g.composite())?,
    );
    let m = monoidal_map(g, a, b)?;
    r.section(format!("product of {ca} and {cb}"));
    r.count("product outcomes", m.source.num_outcomes());
    r.count("product tests", m.source.tests().len());
    r.count("image outcomes", m.target.num_outcomes());
    r.count("dropped outcomes", m.dropped.len());
    r.check("product tests map onto tests", m.test_preserving);
    if args.check_monoidality {
        let rep = monoidality_check(g, a, b)?;
        r.section("monoidality");
        r.count("composite state vertices", rep.vertices);
        if let Some(v) = &rep.failing_vertex {
            r.vector("failing vertex", v);
        }
        r.check("pulled-back weights are non-signalling", rep.nonsignalling);
        r.check("conditionals extend to factor states", rep.conditionals_extend);
        r.check("pullback is bilinear on product states", rep.bilinear);
        r.check("monoidality", rep.passed());
    }
    if args.flags {
        let f = composite_flags_full(g)?;
        r.section("composite flags");
        r.flag("strong", f.strong);
        r.flag("locally tomographic", f.locally_tomographic);
    }
    Ok(())
}

pub fn tensor(file: &ModelFile, a: &str, b: &str, cone: &str, v: &str, r: &mut Report) -> Result<()> {
    let (sa, sb) = (file.space(a)?, file.space(b)?);
    let items: Vec<serde_json::Value> = v.split(',').map(|s| json!(s.trim())).collect();
    let t = vector(&items)?;
    if t.len() != sa.dim() * sb.dim() {
        return Err(Error::Input(format!(
            "vector has {} coordinates; {a} (x) {b} needs {}",
            t.len(),
            sa.dim() * sb.dim()
        )));
    }
    let min = min_cone_membership(sa, sb, &t)?;
    let in_min = min.is_member();
    let in_max = max_cone_contains(sa, sb, &t)?;
    r.section(format!("{a} (x) {b}"));
    r.vector("vector", &t);
    match cone {
        "min" => {
            r.flag("in min cone", in_min);
            if let Some(cert) = min.certificate() {
                r.vector("infeasibility certificate", &cert.multipliers);
                r.check("certificate verifies", cert.verify(&min.lp));
            }
        }
        "max" => r.flag("in max cone", in_max),
        other => return Err(Error::Input(format!("unknown cone {other:?}; use min or max"))),
    }
    r.check("min cone membership implies max cone membership", !in_min || in_max);
    Ok(())
}

fn cover_listing(r: &mut Report, c: &DaceyCover) {
    r.section("coarse-graining");
    r.count("tests", c.coarse.tests().len());
    r.count("outcomes", c.coarse.num_outcomes());
    r.section("cover");
    tests_listing(r, &c.cover);
    let a = c.audit();
    r.check("pi is test-preserving", a.pi_test_preserving);
    r.check("pi is onto", a.pi_onto);
    r.flag("pi injective", a.pi_injective);
    r.flag("psi outcome-preserving", a.psi_outcome_preserving);
    r.check("psi is test-preserving", a.psi_test_preserving);
    r.check("psi is injective", a.psi_injective);
    r.check("the canonical map factors as pi after psi", a.factorization);
}

pub struct DaceyArgs<'a> {
    pub testspace: Option<&'a str>,
    pub weight: Option<&'a str>,
    pub derandomize: bool,
    pub state: Option<&'a str>,
}

pub fn dacey(file: &ModelFile, args: DaceyArgs<'_>, r: &mut Report) -> Result<()> {
    let f = args.weight.map(|w| file.valued_weight(w)).transpose()?;
    let ts = match (args.testspace, f) {
        (Some(t), _) => file.testspace(t)?,
        (None, Some(f)) => f.testspace(),
        (None, None) => return Err(Error::Input("dacey needs a test space or --weight".into())),
    };
    if let (Some(f), Some(_)) = (f, args.testspace) {
        if f.testspace() != ts {
            return Err(Error::Input("the weight lives on a different test space".into()));
        }
    }
    let cover = dacey_cover(ts)?;
    cover_listing(r, &cover);
    r.check("cover weights factor on every weight vertex", cover.factorization_on_vertices()?);
    let Some(f) = f else {
        if args.derandomize || args.state.is_some() {
            return Err(Error::Input("--derandomize and --state need --weight".into()));
        }
        return Ok(());
    };
    if !args.derandomize {
        if args.state.is_some() {
            return Err(Error::Input("--state needs --derandomize".into()));
        }
        return Ok(());
    }
    let d = derandomize(f)?;
    r.section("proportionality classes");
    r.count("classes", d.classes.classes.len());
    for (i, c) in d.classes.classes.iter().enumerate() {
        r.outcomes(format!("class {i}"), &c.iter().map(|&x| ts.outcome(x)).collect::<Vec<_>>());
    }
    r.section("coarse test space");
    tests_listing(r, &d.hat_testspace);
    r.section("coarse weight and dice");
    for (i, c) in d.cells.iter().enumerate() {
        let members: Vec<serde_json::Value> = c.members.iter().map(|&x| r.effects.token(ts.outcome(x))).collect();
        let value = json!({
            "test": c.test,
            "class": c.class,
            "members": members,
            "total": crate::report::vector_json(&c.total),
            "die": crate::report::vector_json(&c.die),
        });
        r.put(format!("cell {i}"), describe_cell(f, c), value);
    }
    r.count("equal-total cell pairs", d.equal_sum_cells.len());
    r.check("dice do not depend on the reference outcome", d.representative_independent);
    r.check("coarse weight factors through the weight model", factorization_check(&d.hat_weight)?);
    if let Some(s) = args.state {
        let (space_name, phi) = file.state(s)?;
        if !file.space(space_name)?.same_as(f.space()) {
            return Err(Error::Input(format!("state {s:?} is not on the weight's space")));
        }
        r.section(format!("simulation of {s}"));
        r.vector("pulled-back weight", &f.pullback_state(phi)?);
        r.check("simulate_check", simulate_check(f, &d, phi)?);
    }
    Ok(())
}

pub fn joint(file: &ModelFile, name: &str, r: &mut Report) -> Result<()> {
    let j = file.joint_weight(name)?;
    let (ma, mb) = (file.model(&j.left)?, file.model(&j.right)?);
    let (m, n) = (ma.testspace(), mb.testspace());
    r.section(format!("joint weight {name}"));
    r.matrix("values", j.weight.values());
    let ns = is_nonsignalling(m, n, &j.weight)?;
    r.flag("non-signalling", ns);
    if ns {
        r.vector("left marginal", &left_marginal(m, n, &j.weight)?);
        r.vector("right marginal", &right_marginal(m, n, &j.weight)?);
    }
    let joint_state = is_joint_state(ma, mb, &j.weight)?;
    r.flag("joint state", joint_state);
    let sep = separability(ma, mb, &j.weight)?;
    r.flag("separable", sep.is_member());
    if let Some(cert) = sep.certificate() {
        r.vector("infeasibility certificate", &cert.multipliers);
        r.check("separability certificate verifies", cert.verify(&sep.lp));
    }
    r.check("separable weights are joint states", !sep.is_member() || joint_state);
    r.check("joint states are non-signalling", !joint_state || ns);
    Ok(())
}
