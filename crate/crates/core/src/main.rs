use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use troplag::affine_complex::validate_surface;
use troplag::chern::{newton_polytope, stability_discriminant, total_chern, PlFunction};
use troplag::cover::{check_class_c, classify, validate_cover, Cover};
use troplag::error::Error;
use troplag::examples::generate;
use troplag::gluing::{obstruction_class, triple_cocycle, GluingData, Obstruction, OrderComplex};
use troplag::graphs::{
    build_fiber_product, build_g0, endomorphism_witness, fiber_counts, find_minimal_cycles, general_simplicity,
    is_simple_rank2, VerdictTag,
};
use troplag::laurent::{reference_constants, verify_constant_independence, verify_cocycle, verify_duality};
use troplag::linalg::{fmt_q, parse_q, Q};
use troplag::pipeline::{load_manifest, outcome_of_error, run_pipeline, trivial_gluing, write_example, Check, Outcome};
use troplag::schema::{parse_complex, parse_gluing, parse_multisection, to_json, GluingDoc, MultiSectionDoc};
use troplag::svg::{layout_seed, render_svg, Layer};

/// Exit codes: 0 success or inconclusive, 1 criterion negative, 2 invalid
/// input, 3 internal invariant breach.
#[derive(Parser)]
#[command(name = "troplag", version, about = "Tropical Lagrangian multi-sections: validation, obstruction and simplicity checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a complex/v1 or multisection/v1 document
    Validate {
        #[arg(long, conflicts_with = "section")]
        complex: Option<PathBuf>,
        #[arg(long)]
        section: Option<PathBuf>,
    },
    /// Classify a multi-section (S_{m,n}, S, C or none)
    Classify {
        #[arg(long)]
        section: PathBuf,
    },
    /// Check the wall-crossing cocycle condition for E_{m,n}
    VerifyCocycle {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, num_args = 3, allow_hyphen_values = true)]
        a: Option<Vec<String>>,
        #[arg(long, num_args = 3, allow_hyphen_values = true)]
        b: Option<Vec<String>>,
    },
    /// Total Chern class and stability of E_{m,n}
    Chern {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Lattice points of the Newton polytope of a PL function {rays, slopes}
    Newton {
        #[arg(long)]
        slopes: PathBuf,
    },
    /// Obstruction class of gluing data
    Obstruction {
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long)]
        section: PathBuf,
        #[arg(long)]
        gluing: Option<PathBuf>,
    },
    /// Simplicity verdict with witnesses
    Simplicity {
        #[arg(long)]
        section: PathBuf,
        #[arg(long)]
        gluing: Option<PathBuf>,
        #[arg(long, conflicts_with = "general")]
        rank2: bool,
        #[arg(long)]
        general: bool,
        /// assert that the local toric bundles of class C exist
        #[arg(long)]
        assume_local_bundles: bool,
    },
    /// Dump the fiber product L ×_B L
    FiberProduct {
        #[arg(long)]
        section: PathBuf,
    },
    /// Write a built-in example (complex, section, gluing, manifest) to a directory
    Example {
        name: String,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an SVG diagnostic (layer: base, cover, G0, cycles, fiber); TOOL_SEED fixes the layout
    Render {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "base")]
        layer: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the pipeline on a manifest and print a report/v1 document
    Run {
        #[arg(long)]
        manifest: PathBuf,
        /// comma-separated subset of validate,classify,cocycle,chern,obstruction,graphs
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
    },
}

type CmdResult = Result<Outcome, Error>;

fn read(p: &Path) -> Result<String, Error> {
    std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))
}

fn section(p: &Path) -> Result<MultiSectionDoc, Error> {
    parse_multisection(&read(p)?)
}

fn cover(p: &Path) -> Result<Cover, Error> {
    Cover::new(&section(p)?).map_err(|r| Error::Invalid(format!("{}: {r}", p.display())))
}

fn gluing(p: &Option<PathBuf>) -> Result<GluingDoc, Error> {
    match p {
        Some(p) => parse_gluing(&read(p)?),
        None => Ok(trivial_gluing()),
    }
}

fn print(v: &impl serde::Serialize) {
    print!("{}", to_json(v));
}

fn constants(v: &Option<Vec<String>>, default: [Q; 3]) -> Result<[Q; 3], Error> {
    let Some(v) = v else { return Ok(default) };
    let mut out = default;
    for (i, s) in v.iter().enumerate() {
        out[i] = parse_q(s).ok_or_else(|| Error::Invalid(format!("`{s}` is not a rational")))?;
    }
    Ok(out)
}

fn obstruction(c: &Cover, g: &GluingData) -> Result<(OrderComplex, Obstruction), Error> {
    let oc = OrderComplex::new(c);
    let cc = triple_cocycle(c, g, &oc)?;
    let o = obstruction_class(&oc, &cc)?;
    Ok((oc, o))
}

fn run(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Validate { complex, section: sec } => {
            let rep = match (complex, sec) {
                (Some(p), _) => validate_surface(&parse_complex(&read(&p)?)?),
                (None, Some(p)) => validate_cover(&section(&p)?),
                (None, None) => return Err(Error::Invalid("pass --complex or --section".into())),
            };
            print(&json!({ "valid": rep.is_ok(), "violations": rep.violations }));
            Ok(if rep.is_ok() { Outcome::Ok } else { Outcome::InvalidInput })
        }
        Cmd::Classify { section } => {
            let c = cover(&section)?;
            print(&json!({ "classification": classify(&c), "class_c": check_class_c(&c) }));
            Ok(Outcome::Ok)
        }
        Cmd::VerifyCocycle { m, n, a, b } => {
            let (a0, b0) = reference_constants();
            let (a, b) = (constants(&a, a0)?, constants(&b, b0)?);
            let r = [verify_cocycle(m, n, &a, &b)?, verify_constant_independence(m, n, &a, &b)?, verify_duality(m, n)?];
            print(&json!({ "m": m, "n": n, "cocycle": r[0], "constant_independence": r[1], "duality": r[2] }));
            Ok(if r.iter().all(|&x| x) { Outcome::Ok } else { Outcome::Negative })
        }
        Cmd::Chern { m, n } => {
            let c = total_chern(m, n)?;
            print(&json!({ "m": m, "n": n, "total_chern": c.to_string(), "stability": stability_discriminant(m, n)? }));
            Ok(Outcome::Ok)
        }
        Cmd::Newton { slopes } => {
            let f: PlFunction = serde_json::from_str(&read(&slopes)?)
                .map_err(|e| Error::Invalid(format!("{}: {e} (line {}, column {})", slopes.display(), e.line(), e.column())))?;
            let p = newton_polytope(&f)?;
            print(&json!({ "points": p.points, "vertices": p.vertices }));
            Ok(Outcome::Ok)
        }
        Cmd::Obstruction { complex, section: sp, gluing: gp } => {
            let c = cover(&sp)?;
            if let Some(cp) = complex {
                if parse_complex(&read(&cp)?)? != section(&sp)?.complex() {
                    return Err(Error::Invalid("the section's base differs from --complex".into()));
                }
            }
            let g = GluingData::from_doc(&c.base, &gluing(&gp)?).map_err(|r| Error::Invalid(r.to_string()))?;
            let (oc, o) = obstruction(&c, &g)?;
            match &o {
                Obstruction::Trivial { k, .. } => {
                    let table: Vec<_> = oc
                        .simplices1
                        .iter()
                        .zip(k)
                        .map(|(&(a, b), x)| json!([node_name(&c, a), node_name(&c, b), fmt_q(x)]))
                        .collect();
                    print(&json!({ "verdict": "trivial", "splitting": table }));
                    Ok(Outcome::Ok)
                }
                Obstruction::Nontrivial { witness } => {
                    print(&json!({ "verdict": "nontrivial", "witness": fmt_q(witness) }));
                    Ok(Outcome::Negative)
                }
            }
        }
        Cmd::Simplicity { section: sp, gluing: gp, rank2, general, assume_local_bundles } => {
            let c = cover(&sp)?;
            let g = GluingData::from_doc(&c.base, &gluing(&gp)?).map_err(|r| Error::Invalid(r.to_string()))?;
            let use_rank2 = rank2 || (!general && c.degree == 2);
            if use_rank2 {
                let trivial = obstruction(&c, &g)?.1.is_trivial();
                let v = is_simple_rank2(&c, trivial)?;
                let mut certs = vec![];
                if v.tag == VerdictTag::NotSimple {
                    for cyc in find_minimal_cycles(&c, &build_g0(&c)) {
                        certs.push(serde_json::to_value(endomorphism_witness(&c, &g, &cyc)?).unwrap_or_default());
                    }
                }
                print(&json!({ "verdict": v, "endomorphism_witnesses": certs }));
                Ok(if v.tag == VerdictTag::NotSimple { Outcome::Negative } else { Outcome::Ok })
            } else {
                let v = general_simplicity(&c, assume_local_bundles)?;
                print(&json!({ "verdict": v }));
                Ok(Outcome::Ok)
            }
        }
        Cmd::FiberProduct { section } => {
            let c = cover(&section)?;
            let p = build_fiber_product(&c);
            print(&json!({ "counts": fiber_counts(&p), "complex": p }));
            Ok(Outcome::Ok)
        }
        Cmd::Example { name, variant, m, n, out } => {
            let ex = generate(&name, variant.as_deref(), m, n)?;
            let path = write_example(&ex, &out)?;
            print(&json!({ "manifest": path, "counts": ex.counts }));
            Ok(Outcome::Ok)
        }
        Cmd::Render { manifest, layer, out } => {
            let inp = load_manifest(&manifest)?;
            let layer = Layer::parse(&layer).ok_or_else(|| Error::Invalid(format!("unknown layer `{layer}`")))?;
            let c = Cover::new(&inp.section).map_err(|r| Error::Invalid(r.to_string()))?;
            let svg = render_svg(&c, layer, layout_seed())?;
            match out {
                Some(p) => std::fs::write(&p, svg).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?,
                None => print!("{svg}"),
            }
            Ok(Outcome::Ok)
        }
        Cmd::Run { manifest, checks } => {
            let inp = load_manifest(&manifest)?;
            let checks = match checks {
                None => Check::ALL.to_vec(),
                Some(v) => v
                    .iter()
                    .map(|s| Check::parse(s).ok_or_else(|| Error::Invalid(format!("unknown check `{s}`"))))
                    .collect::<Result<_, _>>()?,
            };
            let (rep, out) = run_pipeline(&inp, &checks);
            print(&rep);
            Ok(out)
        }
    }
}

fn node_name(c: &Cover, i: usize) -> String {
    let (nv, ne) = (c.vert_ids.len(), c.edge_ids.len());
    if i < nv {
        c.vert_ids[i].clone()
    } else if i < nv + ne {
        c.edge_ids[i - nv].clone()
    } else {
        c.face_ids[i - nv - ne].clone()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(o) => ExitCode::from(o as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(outcome_of_error(&e) as u8)
        }
    }
}
