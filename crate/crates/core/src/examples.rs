//! Built-in generators for the worked examples.
//!
//! Each base B is the combinatorial dual of an explicit triangulated sphere P̌
//! (cube with union-jack faces, or a tetrahedron with edges of length 5). B
//! vertices are P̌ triangles, B edges are P̌ edges and B 2-cells are P̌ points,
//! so every B vertex is trivalent and carries a ℙ²-type fan.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::affine_complex::{combinatorial_dual, Complex};
use crate::cover::build_double_cover;
use crate::error::{pre, Error, Result};
use crate::lattice::V2;
use crate::local_model::{kink, RAYS};
use crate::schema::{
    Asserted, CellDoc, ComplexDoc, ConeDoc, FanDoc, GluingDoc, LiftDoc, MatchingDoc, MultiSectionDoc,
    OrientationDoc, RamificationDoc, RayDoc, SlopeDoc, COMPLEX_V1, GLUING_V1, MULTISECTION_V1,
};

pub const NAMES: [&str; 4] = ["simplex5", "cube2", "cube-o1", "rank3-cube"];

/// Variants accepted per example name.
pub fn variants(name: &str) -> &'static [&'static str] {
    match name {
        "simplex5" => &["74", "58"],
        "cube-o1" => &["petrie", "planted"],
        _ => &[],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Example {
    pub name: String,
    pub variant: Option<String>,
    pub complex: ComplexDoc,
    pub section: MultiSectionDoc,
    pub gluing: GluingDoc,
    /// counts checked at generation time
    pub counts: BTreeMap<String, i64>,
}

/// A triangulated sphere P̌: named points with a colour (or none) and
/// outward-oriented triangles.
struct Sphere {
    points: Vec<String>,
    colour: Option<Vec<u8>>,
    tris: Vec<[usize; 3]>,
    tri_ids: Vec<String>,
}

fn edge_id(points: &[String], a: usize, b: usize) -> String {
    let (x, y) = if points[a] < points[b] { (a, b) } else { (b, a) };
    format!("{}-{}", points[x], points[y])
}

impl Sphere {
    fn doc(&self, singular: &dyn Fn(usize, usize) -> bool) -> ComplexDoc {
        let mut cells: Vec<CellDoc> =
            self.points.iter().map(|p| CellDoc { id: p.clone(), dim: 0, faces: vec![], singular: vec![] }).collect();
        let mut seen = BTreeSet::new();
        for t in &self.tris {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let id = edge_id(&self.points, a, b);
                if seen.insert(id.clone()) {
                    let mut faces = vec![self.points[a].clone(), self.points[b].clone()];
                    faces.sort();
                    let singular = if singular(a, b) { vec!["focus-focus".to_string()] } else { vec![] };
                    cells.push(CellDoc { id, dim: 1, faces, singular });
                }
            }
        }
        let mut orientation = vec![];
        for (t, id) in self.tris.iter().zip(&self.tri_ids) {
            let faces = (0..3).map(|i| edge_id(&self.points, t[i], t[(i + 1) % 3])).collect();
            cells.push(CellDoc { id: id.clone(), dim: 2, faces, singular: vec![] });
            orientation
                .push(OrientationDoc { face: id.clone(), boundary: t.iter().map(|&p| self.points[p].clone()).collect() });
        }
        ComplexDoc {
            schema: COMPLEX_V1.into(),
            cells,
            fans: vec![],
            orientation,
            asserted: Asserted::default(),
            genus: Some(0),
            tags: vec!["dual-no-fans".into()],
        }
    }
}

fn reflect(v: V2) -> V2 {
    V2::new(v.y(), v.x())
}

/// Whether a colour triple is a cyclic rotation of (0, 1, 2).
fn is_positive_rotation(c: [u8; 3]) -> bool {
    matches!(c, [0, 1, 2] | [1, 2, 0] | [2, 0, 1])
}

/// The base B dual to P̌, with fans. With a 3-colouring of P̌ the ray dual to
/// a P̌ edge gets v_c for the colour c missing from that edge, reflected by
/// (x, y) ↦ (y, x) where the colours run clockwise. Without one the standard
/// rays are handed out in faces_around order.
fn dual_base(sp: &Sphere, singular: &dyn Fn(usize, usize) -> bool) -> Result<ComplexDoc> {
    let pc = Complex::new(&sp.doc(singular)).map_err(|r| Error::Internal(format!("P̌: {r}")))?;
    let mut doc = combinatorial_dual(&pc);
    let b = Complex::new(&doc).map_err(|r| Error::Internal(format!("dual: {r}")))?;
    let pindex: HashMap<&str, usize> = sp.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let mut fans = vec![];
    for v in 0..b.verts.len() {
        let around = b.faces_around(v);
        if around.len() != 3 {
            return Err(Error::Internal(format!("dual vertex `{}` is not trivalent", b.verts[v])));
        }
        let rays: Vec<V2> = match &sp.colour {
            Some(col) => {
                let fc: Vec<u8> = around.iter().map(|&f| col[pindex[b.faces[f].as_str()]]).collect();
                let mirrored = !is_positive_rotation([fc[0], fc[1], fc[2]]);
                // ray i separates faces i−1 and i; its colour is that of face i+1
                (0..3)
                    .map(|i| {
                        let r = RAYS[fc[(i + 1) % 3] as usize];
                        if mirrored {
                            reflect(r)
                        } else {
                            r
                        }
                    })
                    .collect()
            }
            None => vec![RAYS[1], RAYS[2], RAYS[0]],
        };
        let rays = around
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let (_, out) = b.corner_edges(f, v).unwrap();
                RayDoc { vec: rays[i].0, edge: b.edges[out].clone() }
            })
            .collect();
        let cones =
            around.iter().enumerate().map(|(i, &f)| ConeDoc { face2: b.faces[f].clone(), rays: [i, (i + 1) % 3] }).collect();
        fans.push(FanDoc { vertex: b.verts[v].clone(), rays, cones });
    }
    doc.fans = fans;
    doc.tags.clear();
    doc.asserted = Asserted { regular: true, positive: true, simple: true, elementary: true };
    Complex::new(&doc).map_err(|r| Error::Internal(format!("base: {r}")))?;
    Ok(doc)
}

/// Union-jack cube on [0,2]³: points "x{a}{b}{c}"; colour 0 for face
/// centres, 1 for edge midpoints, 2 for corners.
fn cube_sphere() -> Sphere {
    let mut coords = vec![];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let p = [a, b, c];
                if p != [1, 1, 1] {
                    coords.push(p);
                }
            }
        }
    }
    let ones = |p: &[i64; 3]| p.iter().filter(|&&x| x == 1).count();
    let points: Vec<String> = coords.iter().map(|p| format!("x{}{}{}", p[0], p[1], p[2])).collect();
    let colour: Vec<u8> = coords.iter().map(|p| 2 - ones(p) as u8).collect();
    let idx: HashMap<[i64; 3], usize> = coords.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut tris = vec![];
    for c in coords.iter().filter(|p| ones(p) == 2) {
        let axis = (0..3).find(|&i| c[i] != 1).unwrap();
        for i in (0..3).filter(|&i| i != axis) {
            let j = 3 - axis - i;
            for s in [0, 2] {
                let mut m = *c;
                m[i] = s;
                for t in [0, 2] {
                    let mut k = m;
                    k[j] = t;
                    let (u, w) = ((0..3).map(|x| m[x] - c[x]).collect::<Vec<_>>(), (0..3).map(|x| k[x] - c[x]).collect::<Vec<_>>());
                    let normal = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
                    let outward: i64 = (0..3).map(|x| normal[x] * (c[x] - 1)).sum();
                    let tri = if outward > 0 { [idx[c], idx[&m], idx[&k]] } else { [idx[c], idx[&k], idx[&m]] };
                    tris.push(tri);
                }
            }
        }
    }
    finish_sphere(points, Some(colour), tris)
}

fn finish_sphere(points: Vec<String>, colour: Option<Vec<u8>>, mut tris: Vec<[usize; 3]>) -> Sphere {
    let key = |t: &[usize; 3]| {
        let mut k: Vec<&String> = t.iter().map(|&p| &points[p]).collect();
        k.sort();
        k.into_iter().cloned().collect::<Vec<_>>()
    };
    tris.sort_by_key(key);
    let tri_ids = (0..tris.len()).map(|i| format!("t{i:03}")).collect();
    Sphere { points, colour, tris, tri_ids }
}

/// Boundary of the simplex of side 5 cut into unit triangles: points
/// "p{a}{b}{c}{d}" with a+b+c+d = 5 and some coordinate zero.
fn simplex_sphere() -> Sphere {
    const N: i64 = 5;
    let mut coords: Vec<[i64; 4]> = vec![];
    for a in 0..=N {
        for b in 0..=N - a {
            for c in 0..=N - a - b {
                let p = [a, b, c, N - a - b - c];
                if p.contains(&0) {
                    coords.push(p);
                }
            }
        }
    }
    let points: Vec<String> = coords.iter().map(|p| format!("p{}{}{}{}", p[0], p[1], p[2], p[3])).collect();
    let idx: HashMap<[i64; 4], usize> = coords.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    // realise in ℝ³ to orient: corners of a regular tetrahedron
    let corner = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let pos = |p: &[i64; 4]| -> [i64; 3] { std::array::from_fn(|x| (0..4).map(|i| p[i] * corner[i][x]).sum()) };
    let mut tris = vec![];
    for z in 0..4 {
        let others: Vec<usize> = (0..4).filter(|&i| i != z).collect();
        let mut base: Vec<[i64; 4]> = vec![];
        for a in 0..=N {
            for b in 0..=N - a {
                for c in 0..=N - a - b {
                    let mut q = [0; 4];
                    q[others[0]] = a;
                    q[others[1]] = b;
                    q[others[2]] = c;
                    base.push(q);
                }
            }
        }
        for q in &base {
            let s: i64 = q.iter().sum();
            let tri: Option<Vec<[i64; 4]>> = if s == N - 1 {
                Some(others.iter().map(|&i| {
                    let mut r = *q;
                    r[i] += 1;
                    r
                }).collect())
            } else if s == N - 2 {
                Some(others.iter().map(|&i| {
                    let mut r = *q;
                    for &j in &others {
                        if j != i {
                            r[j] += 1;
                        }
                    }
                    r
                }).collect())
            } else {
                None
            };
            let Some(tri) = tri else { continue };
            let [a, b, c] = [pos(&tri[0]), pos(&tri[1]), pos(&tri[2])];
            let u: [i64; 3] = std::array::from_fn(|x| b[x] - a[x]);
            let w: [i64; 3] = std::array::from_fn(|x| c[x] - a[x]);
            let normal = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
            let outward: i64 = (0..3).map(|x| normal[x] * (a[x] + b[x] + c[x])).sum();
            let t = [idx[&tri[0]], idx[&tri[1]], idx[&tri[2]]];
            tris.push(if outward > 0 { t } else { [t[0], t[2], t[1]] });
        }
    }
    finish_sphere(points, None, tris)
}

/// W presets for simplex5: B vertices (P̌ triangles) meeting W an odd number
/// of times are branched. Each non-corner P̌ point has even degree, so (E)
/// holds for every W avoiding the corners.
const SIMPLEX5_W74: [&str; 29] = [
    "p0014", "p0122", "p0140", "p0203", "p0230", "p0311", "p0401", "p1004", "p1022", "p1031", "p1040", "p1130", "p1220",
    "p1301", "p1310", "p2012", "p2021", "p2030", "p2102", "p2120", "p2201", "p2210", "p2300", "p3020", "p3101", "p3110",
    "p3200", "p4001", "p4100",
];
const SIMPLEX5_W58: [&str; 23] = [
    "p0032", "p0122", "p0140", "p0203", "p0302", "p0401", "p1004", "p1013", "p1040", "p1130", "p1220", "p2003", "p2012",
    "p2021", "p2030", "p2102", "p2120", "p2210", "p2300", "p3011", "p3020", "p3110", "p4001",
];

fn simplex_singular(sp: &Sphere) -> impl Fn(usize, usize) -> bool + '_ {
    // unit segments k → k+1 along each tetrahedron edge, for k = 1..=4 counted
    // from the endpoint with the larger coordinate index
    move |a: usize, b: usize| {
        let pa: Vec<u32> = sp.points[a][1..].chars().map(|c| c.to_digit(10).unwrap()).collect();
        let pb: Vec<u32> = sp.points[b][1..].chars().map(|c| c.to_digit(10).unwrap()).collect();
        let za: Vec<usize> = (0..4).filter(|&i| pa[i] == 0).collect();
        let zb: Vec<usize> = (0..4).filter(|&i| pb[i] == 0).collect();
        if za.len() < 2 || zb.len() < 2 {
            return false;
        }
        let common: Vec<usize> = za.iter().copied().filter(|i| zb.contains(i)).collect();
        if common.len() != 2 {
            return false;
        }
        let hi = (0..4).rev().find(|i| !common.contains(i)).unwrap();
        pa[hi].min(pb[hi]) >= 1
    }
}

fn cube_singular(sp: &Sphere) -> impl Fn(usize, usize) -> bool + '_ {
    let col = sp.colour.clone().unwrap();
    move |a, b| (col[a] == 2 && col[b] == 1) || (col[a] == 1 && col[b] == 2)
}

fn trivial_gluing() -> GluingDoc {
    GluingDoc { schema: GLUING_V1.into(), entries: vec![], open_induced: true }
}

fn branch_from_shading(b: &Complex, shaded: &BTreeSet<String>) -> Vec<bool> {
    b.verts.iter().map(|v| shaded.contains(v)).collect()
}

/// The Petrie hexagon of the cube matched to faces: (edge midpoint, face
/// centre) in [0,2]³ coordinates.
const PETRIE: [([i64; 3], [i64; 3]); 6] = [
    ([1, 0, 0], [1, 1, 0]),
    ([2, 1, 0], [2, 1, 1]),
    ([2, 2, 1], [1, 2, 1]),
    ([1, 2, 2], [1, 1, 2]),
    ([0, 1, 2], [0, 1, 1]),
    ([0, 0, 1], [1, 0, 1]),
];
/// Midpoint of a cube edge off the Petrie hexagon.
const PLANTED_MIDPOINT: [i64; 3] = [0, 1, 0];

fn pname(p: [i64; 3]) -> String {
    format!("x{}{}{}", p[0], p[1], p[2])
}

fn double_cover_example(
    name: &str,
    variant: Option<&str>,
    sp: &Sphere,
    base: ComplexDoc,
    shaded: BTreeSet<String>,
    m: i64,
    n: i64,
) -> Result<Example> {
    let b = Complex::new(&base).map_err(|r| Error::Internal(r.to_string()))?;
    let branch = branch_from_shading(&b, &shaded);
    let mut section = build_double_cover(&b, &branch, m, n)?;
    section.label = match variant {
        Some(v) => format!("{name} ({v}), local model ({m},{n})"),
        None => format!("{name}, local model ({m},{n})"),
    };
    let mut counts = BTreeMap::new();
    counts.insert("base_vertices".into(), b.verts.len() as i64);
    counts.insert("base_edges".into(), b.edges.len() as i64);
    counts.insert("base_faces".into(), b.faces.len() as i64);
    counts.insert("branch_vertices".into(), shaded.len() as i64);
    counts.insert("singular_markers".into(), b.singular.iter().map(|s| s.len() as i64).sum());
    counts.insert("pcheck_triangles".into(), sp.tris.len() as i64);
    Ok(Example {
        name: name.into(),
        variant: variant.map(String::from),
        complex: base,
        section,
        gluing: trivial_gluing(),
        counts,
    })
}

pub fn simplex5(variant: &str, m: i64, n: i64) -> Result<Example> {
    let sp = simplex_sphere();
    let w: BTreeSet<&str> = match variant {
        "74" => SIMPLEX5_W74.into_iter().collect(),
        "58" => SIMPLEX5_W58.into_iter().collect(),
        _ => return pre(format!("unknown simplex5 preset `{variant}` (74 or 58)")),
    };
    let base = dual_base(&sp, &simplex_singular(&sp))?;
    let shaded: BTreeSet<String> = sp
        .tris
        .iter()
        .zip(&sp.tri_ids)
        .filter(|(t, _)| t.iter().filter(|&&p| w.contains(sp.points[p].as_str())).count() % 2 == 1)
        .map(|(_, id)| id.clone())
        .collect();
    let ex = double_cover_example("simplex5", Some(variant), &sp, base, shaded, m, n)?;
    if ex.counts["singular_markers"] != 24 {
        return Err(Error::Internal(format!("simplex5 carries {} singular markers", ex.counts["singular_markers"])));
    }
    Ok(ex)
}

pub fn cube2(m: i64, n: i64) -> Result<Example> {
    let sp = cube_sphere();
    let base = dual_base(&sp, &cube_singular(&sp))?;
    let shaded: BTreeSet<String> = sp.tri_ids.iter().cloned().collect();
    let ex = double_cover_example("cube2", None, &sp, base, shaded, m, n)?;
    if ex.counts["base_vertices"] != 48 || ex.counts["singular_markers"] != 24 {
        return Err(Error::Internal("cube2 counts are off".into()));
    }
    Ok(ex)
}

pub fn cube_o1(variant: &str, m: i64, n: i64) -> Result<Example> {
    let sp = cube_sphere();
    let base = dual_base(&sp, &cube_singular(&sp))?;
    let mut unshaded: BTreeSet<String> = BTreeSet::new();
    let has = |t: &[usize; 3], p: [i64; 3]| t.iter().any(|&x| sp.points[x] == pname(p));
    for (t, id) in sp.tris.iter().zip(&sp.tri_ids) {
        if PETRIE.iter().any(|&(mid, centre)| has(t, mid) && has(t, centre)) {
            unshaded.insert(id.clone());
        }
        if variant == "planted" && has(t, PLANTED_MIDPOINT) {
            unshaded.insert(id.clone());
        }
    }
    if variant != "petrie" && variant != "planted" {
        return pre(format!("unknown cube-o1 variant `{variant}` (petrie or planted)"));
    }
    let shaded: BTreeSet<String> = sp.tri_ids.iter().filter(|t| !unshaded.contains(*t)).cloned().collect();
    let want = if variant == "planted" { 32 } else { 36 };
    if shaded.len() != want {
        return Err(Error::Internal(format!("cube-o1 has {} branch vertices", shaded.len())));
    }
    double_cover_example("cube-o1", Some(variant), &sp, base, shaded, m, n)
}

/// The nine slopes of the rank-3 local model, `[sheet][displayed cone]`.
pub const RANK3_TABLE: [[V2; 3]; 3] = [
    [V2([-1, -2]), V2([0, -3]), V2([0, 0])],
    [V2([-2, 0]), V2([-1, -1]), V2([-1, 3])],
    [V2([-2, 3]), V2([4, -3]), V2([4, -2])],
];
/// Displayed cone i sits on the ℙ² cone PLACEMENT[i]; the only assignment
/// making the nine pieces continuous.
pub const RANK3_PLACEMENT: [usize; 3] = [1, 2, 0];

/// Slopes of the rank-3 model on the ℙ² cone σ_k, per sheet.
pub fn rank3_slopes_on_cone(sheet: usize, k: usize) -> V2 {
    let displayed = RANK3_PLACEMENT.iter().position(|&c| c == k).unwrap();
    RANK3_TABLE[sheet][displayed]
}

struct Rank3Vertex {
    /// model slope per cycle position
    slopes: Vec<V2>,
    /// kink met when leaving each cycle position counterclockwise
    kinks: Vec<i64>,
}

/// Walk the 9 pieces of the model around a vertex of B: positions run over
/// the vertex's cones 0,1,2,0,1,2,... and the sheet is found by continuity.
fn rank3_model_at(b: &Complex, v: usize, colour_of_face: &dyn Fn(usize) -> usize) -> Result<Rank3Vertex> {
    let fan = &b.fans[v];
    let around = b.faces_around(v);
    let cols: Vec<usize> = around.iter().map(|&f| colour_of_face(f)).collect();
    let mirrored = !is_positive_rotation([cols[0] as u8, cols[1] as u8, cols[2] as u8]);
    let slope = |sheet: usize, cone: usize| {
        let s = rank3_slopes_on_cone(sheet, cols[cone]);
        if mirrored {
            reflect(s)
        } else {
            s
        }
    };
    let mut pos = vec![(0usize, 0usize)];
    while pos.len() < 9 {
        let (sh, c) = *pos.last().unwrap();
        let d = fan.rays[(c + 1) % 3];
        let next: Vec<usize> = (0..3).filter(|&t| (slope(sh, c) - slope(t, (c + 1) % 3)).dot(d) == 0).collect();
        if next.len() != 1 {
            return Err(Error::Internal(format!("rank-3 model is ambiguous at `{}`", b.verts[v])));
        }
        pos.push((next[0], (c + 1) % 3));
    }
    let slopes: Vec<V2> = pos.iter().map(|&(sh, c)| slope(sh, c)).collect();
    let kinks = (0..9).map(|i| kink(fan.rays[(i + 1) % 3], slopes[i], slopes[(i + 1) % 9])).collect();
    Ok(Rank3Vertex { slopes, kinks })
}

/// 3-fold cyclic cover totally ramified at every vertex of the cube base,
/// carrying the rank-3 model everywhere. Sheets over a 2-cell are ℤ/3; edge
/// lift (E, j) joins (F_L, j) to (F_R, j + ε_E). A backtracking search picks ε
/// (zero on a spanning tree of the face adjacency graph) and a rotation of
/// the model at each vertex so that every vertex is totally ramified and
/// both ends of every edge lift see the same kink.
pub fn rank3_cube() -> Result<Example> {
    let sp = cube_sphere();
    let base = dual_base(&sp, &cube_singular(&sp))?;
    let b = Complex::new(&base).map_err(|r| Error::Internal(r.to_string()))?;
    let col = sp.colour.clone().unwrap();
    let pindex: HashMap<&str, usize> = sp.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let colour_of_face = |f: usize| col[pindex[b.faces[f].as_str()]] as usize;
    let models: Vec<Rank3Vertex> =
        (0..b.verts.len()).map(|v| rank3_model_at(&b, v, &colour_of_face)).collect::<Result<_>>()?;
    let (nv, ne, nf) = (b.verts.len(), b.edges.len(), b.faces.len());
    // gauge: ε = 0 on a BFS tree of the face adjacency graph
    let mut fixed = vec![false; ne];
    let mut seen = vec![false; nf];
    seen[0] = true;
    let mut q = VecDeque::from([0]);
    while let Some(f) = q.pop_front() {
        for &e in &b.face_edges[f] {
            let [l, r] = b.edge_faces[e];
            let g = if l == f { r } else { l };
            if !seen[g] {
                seen[g] = true;
                fixed[e] = true;
                q.push_back(g);
            }
        }
    }
    // vertex order: BFS on B
    let mut order = vec![0];
    let mut vseen = vec![false; nv];
    vseen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for e in b.vertex_edges(v) {
            let w = b.other_end(e, v);
            if !vseen[w] {
                vseen[w] = true;
                order.push(w);
            }
        }
    }
    struct Search<'a> {
        b: &'a Complex,
        models: &'a [Rank3Vertex],
        order: Vec<usize>,
        fixed: Vec<bool>,
        eps: Vec<Option<usize>>,
        rot: Vec<Option<usize>>,
        /// kink per (edge, sheet j) from the first endpoint reached
        seen_kink: HashMap<(usize, usize), (usize, i64)>,
        nodes: usize,
    }
    impl Search<'_> {
        /// (face, sheet) at each cycle position and the edge lift crossed
        /// leaving it, or None if the vertex is not totally ramified.
        fn walk(&self, v: usize) -> Option<Vec<(usize, usize, usize, usize)>> {
            let b = self.b;
            let around = b.faces_around(v);
            let mut out = vec![];
            let mut sheet = 0usize;
            for pos in 0..9 {
                let f = around[pos % 3];
                let (inc, _) = b.corner_edges(f, v).unwrap();
                let e = self.eps[inc].unwrap();
                let [l, _] = b.edge_faces[inc];
                let (j, next) = if l == f { (sheet, (sheet + e) % 3) } else { ((sheet + 3 - e) % 3, (sheet + 3 - e) % 3) };
                out.push((f, sheet, inc, j));
                sheet = next;
                if pos % 3 == 2 && pos < 8 && sheet == 0 {
                    return None;
                }
            }
            if sheet != 0 {
                return None;
            }
            Some(out)
        }
        fn go(&mut self, k: usize) -> bool {
            self.nodes += 1;
            if self.nodes > 2_000_000 {
                return false;
            }
            if k == self.order.len() {
                return true;
            }
            let v = self.order[k];
            let free: Vec<usize> =
                self.b.vertex_edges(v).into_iter().filter(|&e| self.eps[e].is_none() && !self.fixed[e]).collect();
            for e in self.b.vertex_edges(v) {
                if self.fixed[e] {
                    self.eps[e] = Some(0);
                }
            }
            let combos = 3usize.pow(free.len() as u32);
            for c in 0..combos {
                let mut x = c;
                for &e in &free {
                    self.eps[e] = Some(x % 3);
                    x /= 3;
                }
                let Some(walk) = self.walk(v) else { continue };
                for rot in 0..3 {
                    let kinks: Vec<((usize, usize), i64)> = walk
                        .iter()
                        .enumerate()
                        .map(|(p, &(_, _, e, j))| ((e, j), self.models[v].kinks[(p + 3 * rot) % 9]))
                        .collect();
                    let ok = kinks.iter().all(|(key, kv)| match self.seen_kink.get(key) {
                        Some(&(w, kw)) if w != v => kw == *kv,
                        _ => true,
                    });
                    if !ok {
                        continue;
                    }
                    let added: Vec<(usize, usize)> =
                        kinks.iter().filter(|(key, _)| !self.seen_kink.contains_key(key)).map(|(key, _)| *key).collect();
                    for (key, kv) in &kinks {
                        self.seen_kink.entry(*key).or_insert((v, *kv));
                    }
                    self.rot[v] = Some(rot);
                    if self.go(k + 1) {
                        return true;
                    }
                    self.rot[v] = None;
                    for key in added {
                        self.seen_kink.remove(&key);
                    }
                }
            }
            for &e in &free {
                self.eps[e] = None;
            }
            false
        }
    }
    let mut s = Search {
        b: &b,
        models: &models,
        order,
        fixed,
        eps: vec![None; ne],
        rot: vec![None; nv],
        seen_kink: HashMap::new(),
        nodes: 0,
    };
    if !s.go(0) {
        return Err(Error::NoSolution("no ℤ/3 cover with matching kinks was found".into()));
    }
    let eps: Vec<usize> = s.eps.iter().map(|e| e.unwrap_or(0)).collect();
    let mut lifts = vec![];
    let mut slopes = vec![];
    let lid = |base: &str, k: usize| format!("{base}#{k}");
    for v in 0..nv {
        lifts.push(LiftDoc { id: lid(&b.verts[v], 0), base: b.verts[v].clone(), faces: vec![] });
        let walk = s.walk(v).unwrap();
        let rot = s.rot[v].unwrap();
        for (p, &(f, sheet, _, _)) in walk.iter().enumerate() {
            slopes.push(SlopeDoc {
                vertex: lid(&b.verts[v], 0),
                face: lid(&b.faces[f], sheet),
                m: models[v].slopes[(p + 3 * rot) % 9].0,
            });
        }
    }
    for e in 0..ne {
        let [x, y] = b.edge_ends[e];
        for j in 0..3 {
            lifts.push(LiftDoc {
                id: lid(&b.edges[e], j),
                base: b.edges[e].clone(),
                faces: vec![lid(&b.verts[x], 0), lid(&b.verts[y], 0)],
            });
        }
    }
    let sheet_of_edge = |e: usize, f: usize, k: usize| if b.edge_faces[e][0] == f { k } else { (k + 3 - eps[e]) % 3 };
    for f in 0..nf {
        for k in 0..3 {
            let faces = b.face_edges[f].iter().map(|&e| lid(&b.edges[e], sheet_of_edge(e, f, k))).collect();
            lifts.push(LiftDoc { id: lid(&b.faces[f], k), base: b.faces[f].clone(), faces });
        }
    }
    let mut matchings = vec![];
    for e in 0..ne {
        for side in 0..2 {
            let f = b.edge_faces[e][side];
            let pairs = (0..3)
                .map(|j| [lid(&b.edges[e], j), lid(&b.faces[f], if side == 0 { j } else { (j + eps[e]) % 3 })])
                .collect();
            matchings.push(MatchingDoc { edge: b.edges[e].clone(), face: b.faces[f].clone(), pairs });
        }
    }
    let section = MultiSectionDoc {
        schema: MULTISECTION_V1.into(),
        cells: base.cells.clone(),
        fans: base.fans.clone(),
        orientation: base.orientation.clone(),
        asserted: base.asserted.clone(),
        genus: base.genus,
        tags: vec![],
        degree: 3,
        lifts,
        matchings,
        branch: b.verts.clone(),
        ramification: b.verts.iter().map(|v| RamificationDoc { vertex: v.clone(), cycles: vec![vec![1, 2, 3]] }).collect(),
        slopes,
        label: "rank3-cube, rank-3 local model at every vertex".into(),
    };
    let mut counts = BTreeMap::new();
    counts.insert("base_vertices".into(), nv as i64);
    counts.insert("branch_vertices".into(), nv as i64);
    counts.insert("singular_markers".into(), b.singular.iter().map(|s| s.len() as i64).sum());
    counts.insert("search_nodes".into(), s.nodes as i64);
    Ok(Example { name: "rank3-cube".into(), variant: None, complex: base, section, gluing: trivial_gluing(), counts })
}

/// Generate an example by name. `variant` defaults to the first listed one.
pub fn generate(name: &str, variant: Option<&str>, m: i64, n: i64) -> Result<Example> {
    let vs = variants(name);
    if variant.is_some() && vs.is_empty() {
        return pre(format!("example `{name}` has no variants"));
    }
    let v = variant.or(vs.first().copied());
    match name {
        "simplex5" => simplex5(v.unwrap(), m, n),
        "cube2" => cube2(m, n),
        "cube-o1" => cube_o1(v.unwrap(), m, n),
        "rank3-cube" => rank3_cube(),
        _ => pre(format!("unknown example `{name}`; expected one of {}", NAMES.join(", "))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{classify, euler_genus, riemann_hurwitz_genus, ClassTag, Cover};

    #[test]
    fn cube_sphere_counts() {
        let sp = cube_sphere();
        assert_eq!(sp.points.len(), 26);
        assert_eq!(sp.tris.len(), 48);
        let pc = Complex::new(&sp.doc(&|_, _| false)).unwrap();
        assert_eq!(pc.edges.len(), 72);
        assert_eq!(pc.euler(), 2);
    }

    #[test]
    fn simplex_sphere_counts() {
        let sp = simplex_sphere();
        assert_eq!(sp.points.len(), 52);
        assert_eq!(sp.tris.len(), 100);
        let pc = Complex::new(&sp.doc(&|_, _| false)).unwrap();
        assert_eq!(pc.edges.len(), 150);
    }

    #[test]
    fn cube2_is_genus_23() {
        let ex = cube2(1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap_or_else(|r| panic!("{r}"));
        assert_eq!(euler_genus(&c).unwrap(), 23);
        assert_eq!(riemann_hurwitz_genus(48).unwrap(), 23);
        assert_eq!(classify(&c).tag, ClassTag::Smn(1, 0));
        assert!(c.edge_kink_mismatches().is_empty());
    }

    #[test]
    fn cube_o1_counts() {
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap_or_else(|r| panic!("{r}"));
        assert_eq!(ex.section.branch.len(), 36);
        assert_eq!(euler_genus(&c).unwrap(), 17);
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap_or_else(|r| panic!("{r}"));
        assert_eq!(euler_genus(&c).unwrap(), 15);
    }

    #[test]
    fn simplex5_presets() {
        for (v, s, g) in [("74", 74, 36), ("58", 58, 28)] {
            let ex = simplex5(v, 1, 0).unwrap();
            assert_eq!(ex.section.branch.len(), s);
            assert_eq!(ex.counts["singular_markers"], 24);
            let c = Cover::new(&ex.section).unwrap_or_else(|r| panic!("{r}"));
            assert_eq!(euler_genus(&c).unwrap(), g);
            assert_eq!(classify(&c).tag, ClassTag::Smn(1, 0));
        }
    }

    #[test]
    fn rank3_cube_counts() {
        let ex = rank3_cube().unwrap();
        let c = Cover::new(&ex.section).unwrap_or_else(|r| panic!("{r}"));
        assert_eq!(c.vert_ids.len(), 48);
        assert_eq!(c.edge_ids.len(), 216);
        assert_eq!(c.face_ids.len(), 78);
        assert_eq!(euler_genus(&c).unwrap(), 46);
        assert!(c.edge_kink_mismatches().is_empty());
    }

    #[test]
    fn rank3_placement_is_the_unique_continuous_one() {
        // oracle: try all six placements on the standard fan and count the
        // ones where every piece continues uniquely across every ray
        let cross = [2, 0, 1]; // σ_k → σ_{k+1} crosses v_{cross[k]}
        let mut good = vec![];
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let t = |a: usize, k: usize| RANK3_TABLE[a][p.iter().position(|&c| c == k).unwrap()];
            let ok = (0..3).all(|a| {
                (0..3).all(|k| {
                    let d = RAYS[cross[k]];
                    (0..3).filter(|&b| (t(a, k) - t(b, (k + 1) % 3)).dot(d) == 0).count() == 1
                })
            });
            if ok {
                good.push(p);
            }
        }
        assert_eq!(good, vec![RANK3_PLACEMENT]);
    }
}
