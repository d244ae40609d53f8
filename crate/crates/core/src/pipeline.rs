//! Manifests, the staged pipeline and its report.
//!
//! Stages run in order validate → classify → cocycle → chern → obstruction →
//! graphs; each emits one record. Every record is deterministic except its
//! timing field.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::affine_complex::validate_surface;
use crate::chern::{stability_discriminant, total_chern};
use crate::cover::{check_class_c, classify, euler_genus, riemann_hurwitz_genus, ClassTag, Cover};
use crate::error::{Error, Result};
use crate::examples::Example;
use crate::gluing::{obstruction_class, triple_cocycle, validate_gluing, GluingData, Obstruction, OrderComplex};
use crate::graphs::{
    endomorphism_witness, find_minimal_cycles, build_g0, general_simplicity, is_simple_rank2, VerdictTag,
    CITE_GENERAL, CITE_LOCAL_BUNDLES,
};
use crate::laurent::{reference_constants, verify_constant_independence, verify_cocycle, verify_duality};
use crate::linalg::fmt_q;
use crate::schema::{
    parse_complex, parse_gluing, parse_multisection, to_json, ComplexDoc, GluingDoc, MultiSectionDoc, RecordDoc,
    ReportDoc, GLUING_V1, REPORT_V1,
};

pub const MANIFEST_V1: &str = "manifest/v1";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    #[serde(default)]
    pub regular: bool,
    #[serde(default)]
    pub positive: bool,
    #[serde(default)]
    pub simple: bool,
    #[serde(default)]
    pub elementary: bool,
    #[serde(default)]
    pub open_gluing_induced: bool,
    /// existence of the local toric bundles for class C
    #[serde(default)]
    pub local_bundles: bool,
}

/// Paths are relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: String,
    pub complex: PathBuf,
    pub section: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<PathBuf>,
    #[serde(default)]
    pub assertions: Assertions,
    /// counts recorded by the generator
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub counts: std::collections::BTreeMap<String, i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Validate,
    Classify,
    Cocycle,
    Chern,
    Obstruction,
    Graphs,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::Validate, Check::Classify, Check::Cocycle, Check::Chern, Check::Obstruction, Check::Graphs];
    pub fn name(self) -> &'static str {
        match self {
            Check::Validate => "validate",
            Check::Classify => "classify",
            Check::Cocycle => "cocycle",
            Check::Chern => "chern",
            Check::Obstruction => "obstruction",
            Check::Graphs => "graphs",
        }
    }
    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Loaded manifest with its documents.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub complex: ComplexDoc,
    pub section: MultiSectionDoc,
    pub gluing: GluingDoc,
    pub assertions: Assertions,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Invalid(m) => Error::Invalid(format!("{}: {m}", path.display())),
        e => e,
    })
}

pub fn trivial_gluing() -> GluingDoc {
    GluingDoc { schema: GLUING_V1.into(), entries: vec![], open_induced: true }
}

pub fn load_manifest(path: &Path) -> Result<Inputs> {
    let m: Manifest = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Invalid(format!("{}: {e} (line {}, column {})", path.display(), e.line(), e.column())))?;
    if m.schema != MANIFEST_V1 {
        return Err(Error::Invalid(format!("{}: schema field is `{}`, expected `{MANIFEST_V1}`", path.display(), m.schema)));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let cp = dir.join(&m.complex);
    let sp = dir.join(&m.section);
    let complex = in_file(&cp, parse_complex(&read(&cp)?))?;
    let section = in_file(&sp, parse_multisection(&read(&sp)?))?;
    let gluing = match &m.gluing {
        Some(g) => {
            let gp = dir.join(g);
            in_file(&gp, parse_gluing(&read(&gp)?))?
        }
        None => trivial_gluing(),
    };
    Ok(Inputs { complex, section, gluing, assertions: m.assertions })
}

/// Write the example's documents and a manifest into `dir`.
pub fn write_example(ex: &Example, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
    let a = &ex.complex.asserted;
    let manifest = Manifest {
        schema: MANIFEST_V1.into(),
        complex: "complex.json".into(),
        section: "section.json".into(),
        gluing: Some("gluing.json".into()),
        assertions: Assertions {
            regular: a.regular,
            positive: a.positive,
            simple: a.simple,
            elementary: a.elementary,
            open_gluing_induced: ex.gluing.open_induced,
            local_bundles: false,
        },
        counts: ex.counts.clone(),
    };
    let files: [(&str, String); 4] = [
        ("complex.json", to_json(&ex.complex)),
        ("section.json", to_json(&ex.section)),
        ("gluing.json", to_json(&ex.gluing)),
        ("manifest.json", to_json(&manifest)),
    ];
    for (name, text) in files {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
    }
    Ok(dir.join("manifest.json"))
}

/// Severity of a record, mapped onto exit codes by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok = 0,
    Negative = 1,
    InvalidInput = 2,
    Internal = 3,
}

pub fn outcome_of_error(e: &Error) -> Outcome {
    match e {
        Error::Internal(_) => Outcome::Internal,
        _ => Outcome::InvalidInput,
    }
}

struct Ctx {
    records: Vec<RecordDoc>,
    outcome: Outcome,
}

impl Ctx {
    fn push(&mut self, check: &str, citation: &str, verdict: &str, witnesses: serde_json::Value, t: Instant, o: Outcome) {
        self.records.push(RecordDoc {
            check: check.into(),
            citation: citation.into(),
            verdict: verdict.into(),
            witnesses,
            timing_ms: t.elapsed().as_secs_f64() * 1e3,
        });
        self.outcome = self.outcome.max(o);
    }
    fn error(&mut self, check: &str, citation: &str, e: &Error, t: Instant) {
        let o = outcome_of_error(e);
        let verdict = if o == Outcome::Internal { "internal_error" } else { "invalid" };
        self.push(check, citation, verdict, json!({ "error": e.to_string() }), t, o);
    }
}

const CITE_SURFACE: &str = "base: closed oriented surface with a complete fan at every vertex";
const CITE_COVER: &str = "multi-section: branched cover with compatible decomposition and PL slopes";
const CITE_GENUS: &str = "Euler characteristic of L against Riemann–Hurwitz for a double cover of the sphere";
const CITE_CLASS: &str = "classes S_{m,n} (simple double points) and C (totally ramified, conditions 1 and 2)";
const CITE_COCYCLE: &str = "wall-crossing transitions satisfy the cocycle condition, independently of the constants up to gauge, with duality E_{m,n}* ≅ E_{−m,−n}";
const CITE_CHERN: &str = "total Chern class of E_{m,n} via piecewise polynomials; discriminant of stability";
const CITE_OBSTRUCTION: &str = "obstruction class in H²(L, ℚ×) of the triple cocycle; trivial iff splitting constants exist";

/// Run the requested checks in stage order.
pub fn run_pipeline(inp: &Inputs, checks: &[Check]) -> (ReportDoc, Outcome) {
    let mut ctx = Ctx { records: vec![], outcome: Outcome::Ok };
    let want = |c: Check| checks.contains(&c);

    let t = Instant::now();
    let rep = validate_surface(&inp.complex);
    if !rep.is_ok() {
        ctx.push("validate.complex", CITE_SURFACE, "invalid", json!({ "errors": rep.violations }), t, Outcome::InvalidInput);
        return finish(ctx);
    }
    let cover = match Cover::new(&inp.section) {
        Ok(c) => c,
        Err(rep) => {
            ctx.push("validate.section", CITE_COVER, "invalid", json!({ "errors": rep.violations }), t, Outcome::InvalidInput);
            return finish(ctx);
        }
    };
    if inp.section.complex() != inp.complex {
        let e = Error::Invalid("the section's base differs from the manifest's complex".into());
        ctx.error("validate.section", CITE_COVER, &e, t);
        return finish(ctx);
    }
    if want(Check::Validate) {
        ctx.push(
            "validate",
            CITE_COVER,
            "pass",
            json!({ "vertices": cover.vert_ids.len(), "edges": cover.edge_ids.len(), "faces": cover.face_ids.len(), "degree": cover.degree, "branch": cover.branch_vertices().len() }),
            t,
            Outcome::Ok,
        );
        let t = Instant::now();
        match euler_genus(&cover) {
            Ok(g) => {
                let rh = if cover.degree == 2 && cover.base.genus() == 0 {
                    riemann_hurwitz_genus(cover.branch_vertices().len() as i64).ok()
                } else {
                    None
                };
                let ok = rh.is_none_or(|r| r == g);
                ctx.push(
                    "genus",
                    CITE_GENUS,
                    if ok { "pass" } else { "fail" },
                    json!({ "euler_genus": g, "riemann_hurwitz_genus": rh }),
                    t,
                    if ok { Outcome::Ok } else { Outcome::Internal },
                );
            }
            Err(e) => ctx.error("genus", CITE_GENUS, &e, t),
        }
    }

    let t = Instant::now();
    let cl = classify(&cover);
    if want(Check::Classify) {
        let class_c = check_class_c(&cover);
        ctx.push(
            "classify",
            CITE_CLASS,
            &cl.tag.to_string(),
            json!({ "reasons": cl.reasons, "class_c": class_c }),
            t,
            Outcome::Ok,
        );
    }
    let pair = match cl.tag {
        ClassTag::Smn(m, n) => Some((m, n)),
        _ => None,
    };

    if want(Check::Cocycle) {
        let t = Instant::now();
        match pair {
            Some((m, n)) => {
                let (a, b) = reference_constants();
                let r = (|| -> Result<[bool; 3]> {
                    Ok([verify_cocycle(m, n, &a, &b)?, verify_constant_independence(m, n, &a, &b)?, verify_duality(m, n)?])
                })();
                match r {
                    Ok(v) => {
                        let ok = v.iter().all(|&x| x);
                        let w = json!({ "m": m, "n": n, "cocycle": v[0], "constant_independence": v[1], "duality": v[2] });
                        ctx.push("cocycle", CITE_COCYCLE, if ok { "pass" } else { "fail" }, w, t, if ok { Outcome::Ok } else { Outcome::Internal });
                    }
                    Err(e) => ctx.error("cocycle", CITE_COCYCLE, &e, t),
                }
            }
            None => ctx.push("cocycle", CITE_COCYCLE, "skipped", json!({ "reason": "no single S_{m,n} local model" }), t, Outcome::Ok),
        }
    }

    if want(Check::Chern) {
        let t = Instant::now();
        match pair {
            Some((m, n)) => match (total_chern(m, n), stability_discriminant(m, n)) {
                (Ok(c), Ok(s)) => ctx.push(
                    "chern",
                    CITE_CHERN,
                    "pass",
                    json!({ "m": m, "n": n, "total_chern": c.to_string(), "stability": s }),
                    t,
                    Outcome::Ok,
                ),
                (Err(e), _) | (_, Err(e)) => ctx.error("chern", CITE_CHERN, &e, t),
            },
            None => ctx.push("chern", CITE_CHERN, "skipped", json!({ "reason": "no single S_{m,n} local model" }), t, Outcome::Ok),
        }
    }

    let t = Instant::now();
    let mut obstruction_trivial = false;
    let gluing = match GluingData::from_doc(&cover.base, &inp.gluing) {
        Ok(g) => Some(g),
        Err(rep) => {
            ctx.push("obstruction", CITE_OBSTRUCTION, "invalid", json!({ "errors": validate_gluing(&cover.base, &inp.gluing).violations, "count": rep.violations.len() }), t, Outcome::InvalidInput);
            None
        }
    };
    if let Some(g) = &gluing {
        let oc = OrderComplex::new(&cover);
        let r = triple_cocycle(&cover, g, &oc).and_then(|c| obstruction_class(&oc, &c));
        match r {
            Ok(o) => {
                obstruction_trivial = o.is_trivial();
                if want(Check::Obstruction) {
                    let (v, w, out) = match &o {
                        Obstruction::Trivial { k, tree_edges } => (
                            "trivial",
                            json!({ "simplices": [oc.n_nodes, oc.simplices1.len(), oc.triangles.len()], "tree_edges": tree_edges, "nontrivial_constants": k.iter().filter(|x| *x != &crate::linalg::q(1)).count() }),
                            Outcome::Ok,
                        ),
                        Obstruction::Nontrivial { witness } => ("nontrivial", json!({ "witness": fmt_q(witness) }), Outcome::Negative),
                    };
                    ctx.push("obstruction", CITE_OBSTRUCTION, v, w, t, out);
                }
            }
            Err(e) => ctx.error("obstruction", CITE_OBSTRUCTION, &e, t),
        }
    }

    if want(Check::Graphs) {
        let t = Instant::now();
        if cover.degree == 2 && cl.tag == ClassTag::None {
            let w = json!({ "reasons": cl.reasons });
            ctx.push("simplicity.rank2", crate::graphs::CITE_RANK2, "invalid", w, t, Outcome::InvalidInput);
        } else if cover.degree == 2 {
            match is_simple_rank2(&cover, obstruction_trivial) {
                Ok(v) => {
                    let mut w = v.witnesses.clone();
                    let mut out = if v.tag == VerdictTag::NotSimple { Outcome::Negative } else { Outcome::Ok };
                    if let (Some(g), Some((m, n))) = (&gluing, pair) {
                        if (m - n).abs() == 1 {
                            let mut certs = vec![];
                            for cyc in find_minimal_cycles(&cover, &build_g0(&cover)) {
                                match endomorphism_witness(&cover, g, &cyc) {
                                    Ok(ew) => {
                                        if !ew.certificate_ok {
                                            out = Outcome::Internal;
                                        }
                                        certs.push(serde_json::to_value(&ew).unwrap_or_default());
                                    }
                                    Err(e) => certs.push(json!({ "cycle": cyc.cell, "error": e.to_string() })),
                                }
                            }
                            w["endomorphism_witnesses"] = json!(certs);
                        }
                    }
                    ctx.push("simplicity.rank2", &v.reasons.join("; "), &v.tag.to_string(), w, t, out);
                }
                Err(Error::Precondition(msg)) => {
                    ctx.push("simplicity.rank2", crate::graphs::CITE_RANK2, "refused", json!({ "reason": msg }), t, Outcome::Ok)
                }
                Err(e) => ctx.error("simplicity.rank2", crate::graphs::CITE_RANK2, &e, t),
            }
        } else {
            match general_simplicity(&cover, inp.assertions.local_bundles) {
                Ok(v) => ctx.push("simplicity.general", &v.reasons.join("; "), &v.tag.to_string(), v.witnesses, t, Outcome::Ok),
                Err(Error::Precondition(msg)) => {
                    let cite = if inp.assertions.local_bundles { CITE_GENERAL } else { CITE_LOCAL_BUNDLES };
                    ctx.push("simplicity.general", cite, "refused", json!({ "reason": msg }), t, Outcome::Ok)
                }
                Err(e) => ctx.error("simplicity.general", CITE_GENERAL, &e, t),
            }
        }
    }
    finish(ctx)
}

fn finish(ctx: Ctx) -> (ReportDoc, Outcome) {
    (ReportDoc { schema: REPORT_V1.into(), records: ctx.records }, ctx.outcome)
}

/// Report with timing fields zeroed, for determinism comparisons.
pub fn without_timing(mut r: ReportDoc) -> ReportDoc {
    for x in &mut r.records {
        x.timing_ms = 0.0;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{cube_o1, rank3_cube};

    fn inputs(ex: &Example) -> Inputs {
        Inputs {
            complex: ex.complex.clone(),
            section: ex.section.clone(),
            gluing: ex.gluing.clone(),
            assertions: Assertions { positive: true, simple: true, elementary: true, ..Default::default() },
        }
    }

    #[test]
    fn cube_o1_pipeline_is_smoothable() {
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let (rep, out) = run_pipeline(&inputs(&ex), &Check::ALL);
        assert_eq!(out, Outcome::Ok, "{}", to_json(&rep));
        let last = rep.records.last().unwrap();
        assert_eq!(last.check, "simplicity.rank2");
        assert_eq!(last.verdict, "smoothable");
        assert!(rep.records.iter().all(|r| !r.citation.is_empty()));
        assert!(rep.records.iter().all(|r| r.verdict != "fail" && r.verdict != "invalid"));
    }

    #[test]
    fn planted_pipeline_is_negative_with_certificate() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let (rep, out) = run_pipeline(&inputs(&ex), &Check::ALL);
        assert_eq!(out, Outcome::Negative);
        let last = rep.records.last().unwrap();
        assert_eq!(last.verdict, "not_simple");
        assert_eq!(last.witnesses["endomorphism_witnesses"][0]["certificate_ok"], json!(true));
    }

    #[test]
    fn pipeline_is_deterministic() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let a = without_timing(run_pipeline(&inputs(&ex), &Check::ALL).0);
        let b = without_timing(run_pipeline(&inputs(&ex), &Check::ALL).0);
        assert_eq!(to_json(&a), to_json(&b));
    }

    #[test]
    fn corrupted_slope_names_the_vertex() {
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        // one slope at a ramified lift, one at an unramified lift
        for ramified in [true, false] {
            let mut inp = inputs(&ex);
            let i = inp
                .section
                .slopes
                .iter()
                .position(|s| {
                    let (_, vl) = c.lift_index(&s.vertex).unwrap();
                    (c.local_degree(vl) > 1) == ramified
                })
                .unwrap();
            let s = &mut inp.section.slopes[i];
            s.m[0] += 1;
            let vertex = if ramified { c.base.verts[c.vert_base[c.lift_index(&s.vertex).unwrap().1]].clone() } else { s.vertex.clone() };
            let (rep, out) = run_pipeline(&inp, &Check::ALL);
            assert_eq!(out, Outcome::InvalidInput);
            assert!(to_json(&rep).contains(&format!("`{vertex}`")), "{}", to_json(&rep));
        }
    }

    #[test]
    fn rank3_without_assumption_refuses() {
        let ex = rank3_cube().unwrap();
        let mut inp = inputs(&ex);
        let (rep, out) = run_pipeline(&inp, &[Check::Graphs]);
        assert_eq!(out, Outcome::Ok);
        let r = rep.records.last().unwrap();
        assert_eq!(r.verdict, "refused");
        assert_eq!(r.citation, CITE_LOCAL_BUNDLES);
        inp.assertions.local_bundles = true;
        let (rep, _) = run_pipeline(&inp, &[Check::Graphs]);
        assert_eq!(rep.records.last().unwrap().citation, CITE_GENERAL);
    }

    #[test]
    fn example_files_round_trip() {
        let dir = std::env::temp_dir().join(format!("troplag-pipeline-{}", std::process::id()));
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let mpath = write_example(&ex, &dir).unwrap();
        let inp = load_manifest(&mpath).unwrap();
        assert_eq!(to_json(&inp.section), std::fs::read_to_string(dir.join("section.json")).unwrap());
        assert_eq!(inp.complex, ex.complex);
        std::fs::remove_dir_all(&dir).ok();
    }
}
