//! Graph criteria for simplicity: G₀ on the base, minimal cycles, the fiber
//! product L ×_B L with its graph G̃₀, and the resulting verdicts.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::chern::{newton_polytope, nonvanishing_at_fixed_point, PlFunction};
use crate::cover::{check_class_c, classify, ClassTag, Cover};
use crate::error::{pre, Error, Result};
use crate::gluing::{check_certificate, holonomy_around_cycle, GluingData, Holonomy};
use crate::lattice::V2;

/// Subgraph of a 1-skeleton; ids refer to cells of the host complex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EmbeddedGraph {
    pub vertices: Vec<String>,
    /// (edge id, [endpoint ids])
    pub edges: Vec<(String, [String; 2])>,
}

impl EmbeddedGraph {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalCycle {
    pub cell: String,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

/// Vertices and edges of the base disjoint from the branch set.
pub fn build_g0(c: &Cover) -> EmbeddedGraph {
    let b = &c.base;
    let vertices = (0..b.verts.len()).filter(|&v| !c.branch[v]).map(|v| b.verts[v].clone()).collect();
    let edges = (0..b.edges.len())
        .filter(|&e| b.edge_ends[e].iter().all(|&v| !c.branch[v]))
        .map(|e| (b.edges[e].clone(), b.edge_ends[e].map(|v| b.verts[v].clone())))
        .collect();
    EmbeddedGraph { vertices, edges }
}

/// 2-cells of the host whose whole boundary lies in g, ordered by cell id.
/// `cells` lists (id, boundary vertex ids, boundary edge ids).
pub fn minimal_cycles_in(g: &EmbeddedGraph, cells: &[(String, Vec<String>, Vec<String>)]) -> Vec<MinimalCycle> {
    let vs: std::collections::HashSet<&str> = g.vertices.iter().map(|s| s.as_str()).collect();
    let es: std::collections::HashSet<&str> = g.edges.iter().map(|(s, _)| s.as_str()).collect();
    let mut out: Vec<MinimalCycle> = cells
        .iter()
        .filter(|(_, v, e)| v.iter().all(|x| vs.contains(x.as_str())) && e.iter().all(|x| es.contains(x.as_str())))
        .map(|(id, v, e)| MinimalCycle { cell: id.clone(), vertices: v.clone(), edges: e.clone() })
        .collect();
    out.sort_by(|a, b| a.cell.cmp(&b.cell));
    out
}

pub fn find_minimal_cycles(c: &Cover, g: &EmbeddedGraph) -> Vec<MinimalCycle> {
    let b = &c.base;
    let cells: Vec<_> = (0..b.faces.len())
        .map(|f| {
            (
                b.faces[f].clone(),
                b.face_verts[f].iter().map(|&v| b.verts[v].clone()).collect(),
                b.face_edges[f].iter().map(|&e| b.edges[e].clone()).collect(),
            )
        })
        .collect();
    minimal_cycles_in(g, &cells)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictTag {
    Simple,
    NotSimple,
    Smoothable,
    CriterionInconclusive,
}

impl std::fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictTag::Simple => "simple",
            VerdictTag::NotSimple => "not_simple",
            VerdictTag::Smoothable => "smoothable",
            VerdictTag::CriterionInconclusive => "criterion_inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub tag: VerdictTag,
    pub reasons: Vec<String>,
    pub witnesses: serde_json::Value,
}

pub const CITE_RANK2: &str = "rank-2 criterion: simple iff G₀ has no minimal cycles (class S_{n+1,n})";
pub const CITE_RANK2_GAP2: &str = "rank-2 criterion for m = n+2: simple iff G₀ has no edges";
pub const CITE_RANK2_GAP3: &str = "rank-2 criterion for m ≥ n+3: simple iff G₀ is empty";
pub const CITE_SMOOTH: &str = "smoothing criterion: simple with trivial obstruction on a positive, simple, elementary decomposition";
pub const CITE_GENERAL: &str = "higher-rank sufficient criterion: no minimal cycles in G̃₀ and a section nonvanishing at a fixed point for each vertex of G̃₀";
pub const CITE_LOCAL_BUNDLES: &str = "local toric bundles for class C are assumed to exist";

/// Verdict for rank 2 in class S_{m,n}. `obstruction_trivial` records
/// whether o = 1 has been established; with it and a positive, simple,
/// elementary decomposition, "simple" becomes "smoothable".
pub fn is_simple_rank2(c: &Cover, obstruction_trivial: bool) -> Result<Verdict> {
    if c.degree != 2 {
        return pre(format!("rank is {}, not 2", c.degree));
    }
    let cl = classify(c);
    let ClassTag::Smn(m, n) = cl.tag else {
        return pre(format!("section is in class {}, not S_{{m,n}}", cl.tag));
    };
    let gap = (m - n).abs();
    if gap < 1 {
        return pre("m = n");
    }
    let g0 = build_g0(c);
    let (simple, reason, witnesses) = match gap {
        1 => {
            let cycles = find_minimal_cycles(c, &g0);
            (cycles.is_empty(), CITE_RANK2, serde_json::json!({ "minimal_cycles": cycles }))
        }
        2 => (g0.edges.is_empty(), CITE_RANK2_GAP2, serde_json::json!({ "g0_edges": g0.edges })),
        _ => (g0.is_empty(), CITE_RANK2_GAP3, serde_json::json!({ "g0_vertices": g0.vertices })),
    };
    let mut reasons = vec![reason.to_string()];
    let a = &c.doc.asserted;
    let tag = if !simple {
        VerdictTag::NotSimple
    } else if obstruction_trivial && a.positive && a.simple && a.elementary {
        reasons.push(CITE_SMOOTH.into());
        VerdictTag::Smoothable
    } else {
        VerdictTag::Simple
    };
    Ok(Verdict { tag, reasons, witnesses })
}

/// One cell σ^(α) ×_σ σ^(β) of the fiber product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCell {
    pub id: String,
    pub dim: u8,
    pub base: String,
    pub pair: [usize; 2],
    pub diagonal: bool,
    /// boundary cells (indices into the complex's cells of dimension dim − 1),
    /// in the base boundary order
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberProductComplex {
    pub vertices: Vec<PairCell>,
    pub edges: Vec<PairCell>,
    pub faces: Vec<PairCell>,
}

fn pair_id(c: &Cover, dim: usize, x: usize, y: usize) -> String {
    let ids = [&c.vert_ids, &c.edge_ids, &c.face_ids][dim];
    format!("({},{})", ids[x], ids[y])
}

/// All ordered pairs of lifts over the same base cell with componentwise
/// incidence.
pub fn build_fiber_product(c: &Cover) -> FiberProductComplex {
    let b = &c.base;
    let mut vidx = HashMap::new();
    let mut vertices = vec![];
    for v in 0..b.verts.len() {
        for &x in &c.vlifts[v] {
            for &y in &c.vlifts[v] {
                vidx.insert((x, y), vertices.len());
                vertices.push(PairCell {
                    id: pair_id(c, 0, x, y),
                    dim: 0,
                    base: b.verts[v].clone(),
                    pair: [x, y],
                    diagonal: x == y,
                    faces: vec![],
                });
            }
        }
    }
    let mut eidx = HashMap::new();
    let mut edges = vec![];
    for e in 0..b.edges.len() {
        for &x in &c.elifts[e] {
            for &y in &c.elifts[e] {
                let faces = (0..2).map(|s| vidx[&(c.edges[x].ends[s], c.edges[y].ends[s])]).collect();
                eidx.insert((x, y), edges.len());
                edges.push(PairCell {
                    id: pair_id(c, 1, x, y),
                    dim: 1,
                    base: b.edges[e].clone(),
                    pair: [x, y],
                    diagonal: x == y,
                    faces,
                });
            }
        }
    }
    let mut faces = vec![];
    for f in 0..b.faces.len() {
        for &x in &c.flifts[f] {
            for &y in &c.flifts[f] {
                let bd = (0..b.face_edges[f].len()).map(|i| eidx[&(c.faces[x].edges[i], c.faces[y].edges[i])]).collect();
                faces.push(PairCell {
                    id: pair_id(c, 2, x, y),
                    dim: 2,
                    base: b.faces[f].clone(),
                    pair: [x, y],
                    diagonal: x == y,
                    faces: bd,
                });
            }
        }
    }
    FiberProductComplex { vertices, edges, faces }
}

/// φ_{v^(β)} − φ_{v^(α)} at an unbranched base vertex.
pub fn pair_function(c: &Cover, pair: [usize; 2]) -> Result<PlFunction> {
    Ok(c.local_function(pair[1])?.sub(&c.local_function(pair[0])?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GTilde {
    pub graph: EmbeddedGraph,
    /// qualifying vertex indices into the fiber product
    pub vertex_cells: Vec<usize>,
    pub edge_cells: Vec<usize>,
}

/// Vertices (v^(α), v^(β)) with v ∉ S and a nonempty Newton polytope of the
/// difference, and the edges between them. Diagonal pairs always qualify
/// away from S (the difference is 0).
pub fn build_g0_tilde(c: &Cover, p: &FiberProductComplex) -> Result<GTilde> {
    let mut ok = vec![false; p.vertices.len()];
    for (i, pc) in p.vertices.iter().enumerate() {
        let v = c.vert_base[pc.pair[0]];
        if c.branch[v] {
            continue;
        }
        ok[i] = !newton_polytope(&pair_function(c, pc.pair)?)?.is_empty();
    }
    let vertex_cells: Vec<usize> = (0..ok.len()).filter(|&i| ok[i]).collect();
    let edge_cells: Vec<usize> = (0..p.edges.len()).filter(|&i| p.edges[i].faces.iter().all(|&v| ok[v])).collect();
    let graph = EmbeddedGraph {
        vertices: vertex_cells.iter().map(|&i| p.vertices[i].id.clone()).collect(),
        edges: edge_cells
            .iter()
            .map(|&i| {
                let f = &p.edges[i].faces;
                (p.edges[i].id.clone(), [p.vertices[f[0]].id.clone(), p.vertices[f[1]].id.clone()])
            })
            .collect(),
    };
    Ok(GTilde { graph, vertex_cells, edge_cells })
}

/// Minimal cycles of G̃₀ bounding off-diagonal 2-cells. Diagonal cells carry
/// only the diagonal part of an endomorphism, which the argument removes.
pub fn off_diagonal_minimal_cycles(p: &FiberProductComplex, g: &GTilde) -> Vec<MinimalCycle> {
    let cells: Vec<_> = p
        .faces
        .iter()
        .filter(|f| !f.diagonal)
        .map(|f| {
            let edges: Vec<&PairCell> = f.faces.iter().map(|&e| &p.edges[e]).collect();
            // vertex i of the boundary is the common vertex of edges i−1 and i
            let k = edges.len();
            let verts = (0..k)
                .map(|i| {
                    let (a, b) = (&edges[(i + k - 1) % k].faces, &edges[i].faces);
                    let v = a.iter().find(|x| b.contains(x)).copied().unwrap_or(b[0]);
                    p.vertices[v].id.clone()
                })
                .collect();
            (f.id.clone(), verts, edges.iter().map(|e| e.id.clone()).collect())
        })
        .collect();
    minimal_cycles_in(&g.graph, &cells)
}

/// Projection of the off-diagonal part of G̃₀ to the base, as sorted id sets.
pub fn project_g0_tilde(c: &Cover, p: &FiberProductComplex, g: &GTilde) -> EmbeddedGraph {
    let b = &c.base;
    let mut vs: Vec<String> =
        g.vertex_cells.iter().filter(|&&i| !p.vertices[i].diagonal).map(|&i| p.vertices[i].base.clone()).collect();
    vs.sort_by_key(|s| b.vertex(s).unwrap_or(usize::MAX));
    vs.dedup();
    let mut es: Vec<(String, [String; 2])> = g
        .edge_cells
        .iter()
        .filter(|&&i| !p.edges[i].diagonal)
        .map(|&i| {
            let e = b.edge(&p.edges[i].base).unwrap();
            (b.edges[e].clone(), b.edge_ends[e].map(|v| b.verts[v].clone()))
        })
        .collect();
    es.sort_by_key(|(s, _)| b.edge(s).unwrap_or(usize::MAX));
    es.dedup();
    EmbeddedGraph { vertices: vs, edges: es }
}

/// The higher-rank sufficient criterion, without the class gate. Never
/// yields not_simple: failure of a hypothesis only makes it inconclusive.
pub fn general_criterion(c: &Cover) -> Result<Verdict> {
    let p = build_fiber_product(c);
    let gt = build_g0_tilde(c, &p)?;
    let cycles = off_diagonal_minimal_cycles(&p, &gt);
    let g0 = build_g0(c);
    let base_cycles = find_minimal_cycles(c, &g0);
    // cross-check against the base graph: the projection of the cycles of
    // G̃₀ must be among the minimal cycles of G₀
    let mut projected: Vec<String> = cycles.iter().map(|m| p.faces.iter().find(|f| f.id == m.cell).unwrap().base.clone()).collect();
    projected.sort();
    projected.dedup();
    for f in &projected {
        if !base_cycles.iter().any(|m| &m.cell == f) {
            return Err(Error::Internal(format!("minimal cycle of G̃₀ over `{f}` has no counterpart in G₀")));
        }
    }
    let mut failing = vec![];
    for &i in &gt.vertex_cells {
        let pc = &p.vertices[i];
        if pc.diagonal {
            continue;
        }
        let f = pair_function(c, pc.pair)?;
        let poly = newton_polytope(&f)?;
        let mut any = false;
        for cone in 0..f.rays.len() {
            any |= nonvanishing_at_fixed_point(&f, &poly, cone)?;
        }
        if !any {
            failing.push(pc.id.clone());
        }
    }
    let off_vertices = gt.vertex_cells.iter().filter(|&&i| !p.vertices[i].diagonal).count();
    let witnesses = serde_json::json!({
        "g0_tilde_off_diagonal_vertices": off_vertices,
        "minimal_cycles": cycles,
        "base_minimal_cycles": base_cycles.iter().map(|m| m.cell.clone()).collect::<Vec<_>>(),
        "no_fixed_point_section": failing,
    });
    let mut reasons = vec![CITE_GENERAL.to_string()];
    let tag = if cycles.is_empty() && failing.is_empty() {
        reasons.push("criterion satisfied: simple and smoothable".into());
        VerdictTag::Smoothable
    } else {
        if !cycles.is_empty() {
            reasons.push(format!("G̃₀ has {} minimal cycle(s)", cycles.len()));
        }
        if !failing.is_empty() {
            reasons.push(format!("no cone passes the fixed-point test at {}", failing.join(", ")));
        }
        VerdictTag::CriterionInconclusive
    };
    Ok(Verdict { tag, reasons, witnesses })
}

/// Gated entry point: class C must hold and the caller must assume the local
/// toric bundles exist.
pub fn general_simplicity(c: &Cover, assume_local_bundles: bool) -> Result<Verdict> {
    if !assume_local_bundles {
        return pre(format!("refused: {CITE_LOCAL_BUNDLES}, but the assumption flag is not set"));
    }
    let rep = check_class_c(c);
    if !rep.holds {
        return pre(format!("section is not in class C: {}", rep.failures.join("; ")));
    }
    general_criterion(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexWeights {
    pub vertex: String,
    /// sheet order (α, β) of the difference whose polytope is used
    pub pair: [String; 2],
    pub weights: Vec<V2>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndomorphismWitness {
    pub cycle: MinimalCycle,
    pub holonomy: Holonomy,
    pub section_weights: Vec<VertexWeights>,
    /// the endomorphism is extended by zero off the star of the cycle
    pub zero_extension: bool,
    pub certificate_ok: bool,
}

/// Certificate for a minimal cycle: constants c_v from the holonomy and, at
/// each vertex of the cycle, the weights of sections of the difference line
/// bundle vanishing on the divisors of the half-edges (edges at the vertex
/// not in the cycle).
pub fn endomorphism_witness(c: &Cover, g: &GluingData, cycle: &MinimalCycle) -> Result<EndomorphismWitness> {
    let b = &c.base;
    let face = b.face(&cycle.cell)?;
    if b.face_verts[face].iter().any(|&v| c.branch[v]) {
        return pre(format!("`{}` is not a minimal cycle of G₀", cycle.cell));
    }
    let holonomy = holonomy_around_cycle(c, g, face)?;
    let (fa, fb) = (c.flifts[face][0], c.flifts[face][1]);
    let n = b.face_verts[face].len();
    let mut section_weights = vec![];
    for i in 0..n {
        let v = b.face_verts[face][i];
        let (e_in, e_out) = (b.face_edges[face][(i + n - 1) % n], b.face_edges[face][i]);
        let fan = &b.fans[v];
        // half-edges: edges at v outside the cycle
        let rays: Vec<usize> = (0..fan.len()).filter(|&r| fan.ray_edges[r] != e_in && fan.ray_edges[r] != e_out).collect();
        let (ua, ub) = (c.faces[fa].verts[i], c.faces[fb].verts[i]);
        let mut best = None;
        for pair in [[ua, ub], [ub, ua]] {
            let f = pair_function(c, pair)?;
            let poly = newton_polytope(&f)?;
            if poly.is_empty() {
                continue;
            }
            let weights: Vec<V2> = poly
                .points
                .iter()
                .copied()
                .filter(|u| rays.iter().all(|&r| u.dot(f.rays[r]) > f.value_on_ray(r)))
                .collect();
            best = Some(VertexWeights { vertex: b.verts[v].clone(), pair: pair.map(|x| c.vert_ids[x].clone()), weights });
            break;
        }
        section_weights.push(best.ok_or_else(|| Error::Invalid(format!("both differences at `{}` have empty polytopes", b.verts[v])))?);
    }
    let certificate_ok = check_certificate(&holonomy) && section_weights.iter().all(|w| !w.weights.is_empty());
    Ok(EndomorphismWitness { cycle: cycle.clone(), holonomy, section_weights, zero_extension: true, certificate_ok })
}

/// Counts of the fiber product by dimension and diagonal flag.
pub fn fiber_counts(p: &FiberProductComplex) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for (name, cells) in [("vertices", &p.vertices), ("edges", &p.edges), ("faces", &p.faces)] {
        m.insert(format!("{name}_diagonal"), cells.iter().filter(|x| x.diagonal).count());
        m.insert(format!("{name}_off_diagonal"), cells.iter().filter(|x| !x.diagonal).count());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{cube2, cube_o1, rank3_cube, simplex5};
    use crate::gluing::TorusElement;
    use crate::linalg::q;

    #[test]
    fn all_branched_gives_empty_g0() {
        let ex = cube2(1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let g = build_g0(&c);
        assert!(g.is_empty() && g.edges.is_empty());
        assert!(find_minimal_cycles(&c, &g).is_empty());
        assert_eq!(is_simple_rank2(&c, false).unwrap().tag, VerdictTag::Simple);
    }

    #[test]
    fn petrie_cube_has_no_minimal_cycles() {
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let g = build_g0(&c);
        assert!(!g.edges.is_empty());
        assert!(find_minimal_cycles(&c, &g).is_empty());
        let v = is_simple_rank2(&c, true).unwrap();
        assert!(matches!(v.tag, VerdictTag::Simple | VerdictTag::Smoothable));
    }

    #[test]
    fn simplex_presets_are_simple() {
        for w in ["74", "58"] {
            let ex = simplex5(w, 1, 0).unwrap();
            let c = Cover::new(&ex.section).unwrap();
            assert!(find_minimal_cycles(&c, &build_g0(&c)).is_empty(), "{w}");
        }
    }

    #[test]
    fn planted_cycle_flips_the_verdict() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let g = build_g0(&c);
        let cycles = find_minimal_cycles(&c, &g);
        assert_eq!(cycles.len(), 1);
        let v = is_simple_rank2(&c, true).unwrap();
        assert_eq!(v.tag, VerdictTag::NotSimple);
        let w = endomorphism_witness(&c, &GluingData::default(), &cycles[0]).unwrap();
        assert!(w.certificate_ok);
        assert!(w.holonomy.constants.iter().all(|(_, x)| x == "1"));
        for sw in &w.section_weights {
            assert_eq!(sw.weights.len(), 1, "{sw:?}");
        }
    }

    #[test]
    fn corrupted_gluing_is_reported() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let cycles = find_minimal_cycles(&c, &build_g0(&c));
        let b = &c.base;
        let f = b.face(&cycles[0].cell).unwrap();
        // a planted obstruction on one flag near the cycle makes the class nontrivial or the holonomy fail
        let mut g = GluingData::default();
        g.ve.insert((b.face_verts[f][0], b.face_edges[f][0]), TorusElement::single(vec![1], q(3)));
        assert!(endomorphism_witness(&c, &g, &cycles[0]).is_err());
    }

    #[test]
    fn minimal_cycles_ignore_order() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let g = build_g0(&c);
        let mut rev = g.clone();
        rev.vertices.reverse();
        rev.edges.reverse();
        assert_eq!(find_minimal_cycles(&c, &g), find_minimal_cycles(&c, &rev));
    }

    #[test]
    fn incomplete_boundary_not_listed() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let mut g = build_g0(&c);
        let cyc = &find_minimal_cycles(&c, &g)[0];
        let drop = cyc.vertices[0].clone();
        g.vertices.retain(|v| *v != drop);
        g.edges.retain(|(_, ends)| !ends.contains(&drop));
        assert!(find_minimal_cycles(&c, &g).is_empty());
    }

    #[test]
    fn gap_rules() {
        // m = n+3 on the petrie cube: G₀ is nonempty, so not simple
        let ex = cube_o1("petrie", 3, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        assert_eq!(is_simple_rank2(&c, false).unwrap().tag, VerdictTag::NotSimple);
        let ex = cube_o1("petrie", 2, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        assert_eq!(is_simple_rank2(&c, false).unwrap().tag, VerdictTag::NotSimple);
        // symmetric in (m, n)
        let ex = cube_o1("petrie", 0, 1).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        assert_eq!(is_simple_rank2(&c, false).unwrap().tag, VerdictTag::Simple);
    }

    #[test]
    fn fiber_product_shapes() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let p = build_fiber_product(&c);
        let b = &c.base;
        // unbranched cells lift to 2×2 pairs, branch vertices to one
        let nb = c.branch_vertices().len();
        assert_eq!(p.vertices.len(), 4 * (b.verts.len() - nb) + nb);
        assert_eq!(p.edges.len(), 4 * b.edges.len());
        assert_eq!(p.faces.len(), 4 * b.faces.len());
        // diagonal ≅ L
        assert_eq!(p.vertices.iter().filter(|x| x.diagonal).count(), c.vert_ids.len());
        assert_eq!(p.edges.iter().filter(|x| x.diagonal).count(), c.edge_ids.len());
        assert_eq!(p.faces.iter().filter(|x| x.diagonal).count(), c.face_ids.len());
        for e in p.edges.iter().filter(|x| x.diagonal) {
            let el = e.pair[0];
            for s in 0..2 {
                assert_eq!(p.vertices[e.faces[s]].pair, [c.edges[el].ends[s]; 2]);
            }
        }
    }

    #[test]
    fn rank2_g0_tilde_matches_g0() {
        for v in ["petrie", "planted"] {
            let ex = cube_o1(v, 1, 0).unwrap();
            let c = Cover::new(&ex.section).unwrap();
            let p = build_fiber_product(&c);
            let gt = build_g0_tilde(&c, &p).unwrap();
            let g0 = build_g0(&c);
            assert_eq!(project_g0_tilde(&c, &p, &gt), g0);
            // exactly one of the two off-diagonal orders qualifies at each vertex
            let off = gt.vertex_cells.iter().filter(|&&i| !p.vertices[i].diagonal).count();
            assert_eq!(off, g0.vertices.len());
        }
    }

    #[test]
    fn general_path_agrees_with_rank2() {
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        assert_eq!(general_criterion(&c).unwrap().tag, VerdictTag::Smoothable);
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        assert_eq!(general_criterion(&c).unwrap().tag, VerdictTag::CriterionInconclusive);
    }

    #[test]
    fn rank3_g0_tilde_is_empty() {
        let ex = rank3_cube().unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let p = build_fiber_product(&c);
        let gt = build_g0_tilde(&c, &p).unwrap();
        assert!(gt.graph.is_empty());
        assert_eq!(general_criterion(&c).unwrap().tag, VerdictTag::Smoothable);
        assert!(general_simplicity(&c, false).unwrap_err().to_string().contains("local toric bundles"));
    }
}
