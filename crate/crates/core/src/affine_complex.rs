//! The base (B, 𝒫): a closed oriented polyhedral surface with integral fans
//! at its vertices.
//!
//! Cells are indexed per dimension in lexicographic id order, so every
//! enumeration below is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{det, is_complete_ccw, transverse, V2};
use crate::schema::{CellDoc, ComplexDoc, OrientationDoc, COMPLEX_V1};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
    pub(crate) fn push(&mut self, s: impl Into<String>) {
        self.violations.push(s.into());
    }
    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.contains(needle))
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        write!(f, "{}", self.violations.join("; "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CellRef {
    V(usize),
    E(usize),
    F(usize),
}

impl CellRef {
    pub fn dim(self) -> u8 {
        match self {
            CellRef::V(_) => 0,
            CellRef::E(_) => 1,
            CellRef::F(_) => 2,
        }
    }
}

/// Fan at a vertex: rays in ccw order, ray i lies along edge `ray_edges[i]`,
/// and the cone between rays i and i+1 is 2-cell `cone_faces[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub rays: Vec<V2>,
    pub ray_edges: Vec<usize>,
    pub cone_faces: Vec<usize>,
}

impl Fan {
    pub fn ray_of_edge(&self, e: usize) -> Option<usize> {
        self.ray_edges.iter().position(|&x| x == e)
    }
    pub fn cone_of_face(&self, f: usize) -> Option<usize> {
        self.cone_faces.iter().position(|&x| x == f)
    }
    pub fn len(&self) -> usize {
        self.rays.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }
}

/// A validated surface.
#[derive(Clone, Debug)]
pub struct Complex {
    pub doc: ComplexDoc,
    pub verts: Vec<String>,
    pub edges: Vec<String>,
    pub faces: Vec<String>,
    index: HashMap<String, CellRef>,
    /// endpoints in index order
    pub edge_ends: Vec<[usize; 2]>,
    /// [left, right] of the edge directed from its smaller to its larger endpoint
    pub edge_faces: Vec<[usize; 2]>,
    /// ccw vertex cycle, rotated to start at the smallest vertex
    pub face_verts: Vec<Vec<usize>>,
    /// face_edges[f][i] joins face_verts[f][i] to face_verts[f][i+1]
    pub face_edges: Vec<Vec<usize>>,
    /// empty for complexes that carry no fan data
    pub fans: Vec<Fan>,
    pub singular: Vec<Vec<String>>,
}

fn rotate_to_min(c: &[usize]) -> Vec<usize> {
    let k = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
    c[k..].iter().chain(&c[..k]).copied().collect()
}

struct Draft {
    verts: Vec<String>,
    edges: Vec<String>,
    faces: Vec<String>,
    index: HashMap<String, CellRef>,
    edge_ends: Vec<Option<[usize; 2]>>,
    face_edge_sets: Vec<BTreeSet<usize>>,
    edge_cofaces: Vec<Vec<usize>>,
}

fn draft(doc: &ComplexDoc, rep: &mut ValidationReport) -> Draft {
    let mut by_dim: [Vec<&CellDoc>; 3] = [vec![], vec![], vec![]];
    let mut seen = BTreeSet::new();
    for c in &doc.cells {
        if !seen.insert(c.id.clone()) {
            rep.push(format!("duplicate cell id `{}`", c.id));
            continue;
        }
        if c.dim > 2 {
            rep.push(format!("cell `{}` has dimension {}", c.id, c.dim));
            continue;
        }
        if !c.singular.is_empty() && c.dim != 1 {
            rep.push(format!("singular markers on non-edge cell `{}`", c.id));
        }
        by_dim[c.dim as usize].push(c);
    }
    for v in by_dim.iter_mut() {
        v.sort_by(|a, b| a.id.cmp(&b.id));
    }
    let ids = |d: usize| by_dim[d].iter().map(|c| c.id.clone()).collect::<Vec<_>>();
    let (verts, edges, faces) = (ids(0), ids(1), ids(2));
    let mut index = HashMap::new();
    for (i, v) in verts.iter().enumerate() {
        index.insert(v.clone(), CellRef::V(i));
    }
    for (i, v) in edges.iter().enumerate() {
        index.insert(v.clone(), CellRef::E(i));
    }
    for (i, v) in faces.iter().enumerate() {
        index.insert(v.clone(), CellRef::F(i));
    }
    for c in &by_dim[0] {
        if !c.faces.is_empty() {
            rep.push(format!("vertex `{}` lists faces", c.id));
        }
    }
    let mut edge_ends = vec![None; edges.len()];
    for (i, c) in by_dim[1].iter().enumerate() {
        let vs: Vec<usize> = c
            .faces
            .iter()
            .filter_map(|f| match index.get(f) {
                Some(CellRef::V(v)) => Some(*v),
                _ => {
                    rep.push(format!("edge `{}` has face `{f}` which is not a vertex", c.id));
                    None
                }
            })
            .collect();
        if vs.len() != 2 || vs[0] == vs[1] {
            rep.push(format!("edge `{}` must have exactly two distinct vertex faces", c.id));
        } else {
            edge_ends[i] = Some([vs[0].min(vs[1]), vs[0].max(vs[1])]);
        }
    }
    let mut face_edge_sets = vec![BTreeSet::new(); faces.len()];
    let mut edge_cofaces = vec![vec![]; edges.len()];
    for (i, c) in by_dim[2].iter().enumerate() {
        for f in &c.faces {
            match index.get(f) {
                Some(CellRef::E(e)) => {
                    if !face_edge_sets[i].insert(*e) {
                        rep.push(format!("2-cell `{}` lists edge `{f}` twice", c.id));
                    } else {
                        edge_cofaces[*e].push(i);
                    }
                }
                _ => rep.push(format!("2-cell `{}` has face `{f}` which is not an edge", c.id)),
            }
        }
        if face_edge_sets[i].len() < 2 {
            rep.push(format!("2-cell `{}` has fewer than two edges", c.id));
        }
    }
    for (e, cf) in edge_cofaces.iter().enumerate() {
        match cf.len() {
            2 => {}
            1 => rep.push(format!("edge with one coface: `{}`", edges[e])),
            k => rep.push(format!("edge `{}` has {k} cofaces", edges[e])),
        }
    }
    Draft { verts, edges, faces, index, edge_ends, face_edge_sets, edge_cofaces }
}

fn orient(doc: &ComplexDoc, d: &Draft, rep: &mut ValidationReport) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let nf = d.faces.len();
    let mut fv = vec![vec![]; nf];
    let mut fe = vec![vec![]; nf];
    let mut given: BTreeMap<usize, &OrientationDoc> = BTreeMap::new();
    for o in &doc.orientation {
        match d.index.get(&o.face) {
            Some(CellRef::F(f)) => {
                if given.insert(*f, o).is_some() {
                    rep.push(format!("2-cell `{}` oriented twice", o.face));
                }
            }
            _ => rep.push(format!("orientation entry for unknown 2-cell `{}`", o.face)),
        }
    }
    for f in 0..nf {
        let Some(o) = given.get(&f) else {
            rep.push(format!("2-cell `{}` has no orientation", d.faces[f]));
            continue;
        };
        let mut cyc = vec![];
        for v in &o.boundary {
            match d.index.get(v) {
                Some(CellRef::V(x)) => cyc.push(*x),
                _ => rep.push(format!("orientation of `{}` names unknown vertex `{v}`", d.faces[f])),
            }
        }
        let k = cyc.len();
        let mut edges = vec![];
        for i in 0..k {
            let (a, b) = (cyc[i], cyc[(i + 1) % k]);
            let key = [a.min(b), a.max(b)];
            let hits: Vec<usize> =
                d.face_edge_sets[f].iter().copied().filter(|&e| d.edge_ends[e] == Some(key)).collect();
            if hits.len() != 1 {
                rep.push(format!(
                    "boundary of `{}` does not match its edges between `{}` and `{}`",
                    d.faces[f], d.verts[a], d.verts[b]
                ));
            } else {
                edges.push(hits[0]);
            }
        }
        let used: BTreeSet<usize> = edges.iter().copied().collect();
        if used.len() != edges.len() || used != d.face_edge_sets[f] || cyc.iter().collect::<BTreeSet<_>>().len() != k {
            rep.push(format!("boundary cycle of `{}` is not a simple cycle through its edges", d.faces[f]));
            continue;
        }
        let r = (0..k).min_by_key(|&i| cyc[i]).unwrap_or(0);
        fv[f] = cyc[r..].iter().chain(&cyc[..r]).copied().collect();
        fe[f] = edges[r..].iter().chain(&edges[..r]).copied().collect();
    }
    (fv, fe)
}

/// Corner data of face f at vertex v: (previous vertex, next vertex).
fn corner(fv: &[usize], v: usize) -> Option<(usize, usize)> {
    let k = fv.len();
    let i = fv.iter().position(|&x| x == v)?;
    Some((fv[(i + k - 1) % k], fv[(i + 1) % k]))
}

fn build(doc: &ComplexDoc, rep: &mut ValidationReport) -> Option<Complex> {
    let d = draft(doc, rep);
    let (face_verts, face_edges) = orient(doc, &d, rep);
    if !rep.is_ok() {
        return None;
    }
    let edge_ends: Vec<[usize; 2]> = d.edge_ends.iter().map(|x| x.unwrap()).collect();
    // left face of a→b (a < b) is the one whose ccw boundary runs a then b
    let mut edge_faces = vec![[usize::MAX; 2]; d.edges.len()];
    for (e, cf) in d.edge_cofaces.iter().enumerate() {
        let [a, b] = edge_ends[e];
        for &f in cf {
            let k = face_verts[f].len();
            let i = face_edges[f].iter().position(|&x| x == e).unwrap();
            let forward = face_verts[f][i] == a && face_verts[f][(i + 1) % k] == b;
            let slot = if forward { 0 } else { 1 };
            if edge_faces[e][slot] != usize::MAX {
                rep.push(format!("edge `{}` is traversed the same way by both cofaces", d.edges[e]));
            }
            edge_faces[e][slot] = f;
        }
    }
    let mut singular = vec![vec![]; d.edges.len()];
    for c in &doc.cells {
        if let Some(CellRef::E(e)) = d.index.get(&c.id) {
            singular[*e] = c.singular.clone();
        }
    }
    let mut fans = vec![];
    let has_fans = !doc.fans.is_empty() || !doc.tags.iter().any(|t| t == "dual-no-fans");
    if has_fans {
        let mut by_vertex: BTreeMap<usize, &crate::schema::FanDoc> = BTreeMap::new();
        for fd in &doc.fans {
            match d.index.get(&fd.vertex) {
                Some(CellRef::V(v)) => {
                    if by_vertex.insert(*v, fd).is_some() {
                        rep.push(format!("vertex `{}` has two fans", fd.vertex));
                    }
                }
                _ => rep.push(format!("fan for unknown vertex `{}`", fd.vertex)),
            }
        }
        for v in 0..d.verts.len() {
            let vid = &d.verts[v];
            let Some(fd) = by_vertex.get(&v) else {
                rep.push(format!("vertex `{vid}` has no fan"));
                continue;
            };
            let rays: Vec<V2> = fd.rays.iter().map(|r| V2(r.vec)).collect();
            let mut ray_edges = vec![];
            for r in &fd.rays {
                match d.index.get(&r.edge) {
                    Some(CellRef::E(e)) if edge_ends[*e].contains(&v) => ray_edges.push(*e),
                    _ => rep.push(format!("fan at `{vid}`: ray edge `{}` is not incident", r.edge)),
                }
                if !V2(r.vec).is_primitive() {
                    rep.push(format!("fan at `{vid}`: ray {:?} is not primitive", r.vec));
                }
            }
            let incident: BTreeSet<usize> = (0..d.edges.len()).filter(|&e| edge_ends[e].contains(&v)).collect();
            if ray_edges.iter().copied().collect::<BTreeSet<_>>() != incident || ray_edges.len() != incident.len() {
                rep.push(format!("fan at `{vid}`: rays do not match the incident edges one to one"));
            }
            if !is_complete_ccw(&rays) {
                rep.push(format!("fan not complete at `{vid}`"));
            }
            let k = rays.len();
            let mut cone_faces = vec![usize::MAX; k];
            for c in &fd.cones {
                let [i, j] = c.rays;
                if i >= k || j != (i + 1) % k {
                    rep.push(format!("fan at `{vid}`: cone rays {:?} are not consecutive", c.rays));
                    continue;
                }
                match d.index.get(&c.face2) {
                    Some(CellRef::F(f)) => cone_faces[i] = *f,
                    _ => rep.push(format!("fan at `{vid}`: unknown 2-cell `{}`", c.face2)),
                }
            }
            let containing: BTreeSet<usize> = (0..d.faces.len()).filter(|&f| face_verts[f].contains(&v)).collect();
            if cone_faces.contains(&usize::MAX)
                || cone_faces.iter().copied().collect::<BTreeSet<_>>() != containing
                || containing.len() != k
            {
                rep.push(format!("fan at `{vid}`: cones are not a bijection onto the 2-cells at the vertex"));
            } else if ray_edges.len() == k {
                // cone i sits between rays i and i+1: in its 2-cell, v is
                // followed along the ray-i edge and preceded along the ray-(i+1) edge
                for i in 0..k {
                    let f = cone_faces[i];
                    let other = |e: usize| if edge_ends[e][0] == v { edge_ends[e][1] } else { edge_ends[e][0] };
                    let (prev, next) = corner(&face_verts[f], v).unwrap();
                    if next != other(ray_edges[i]) || prev != other(ray_edges[(i + 1) % k]) {
                        rep.push(format!(
                            "fan at `{vid}`: cone over `{}` disagrees with the 2-cell orientation",
                            d.faces[f]
                        ));
                    }
                }
            }
            fans.push(Fan { rays, ray_edges, cone_faces });
        }
    }
    if !rep.is_ok() {
        return None;
    }
    let cx = Complex {
        doc: doc.clone(),
        verts: d.verts,
        edges: d.edges,
        faces: d.faces,
        index: d.index,
        edge_ends,
        edge_faces,
        face_verts,
        face_edges,
        fans,
        singular,
    };
    // every vertex link must be one cycle of corners
    for v in 0..cx.verts.len() {
        let around = cx.faces_around(v);
        let total = (0..cx.faces.len()).filter(|&f| cx.face_verts[f].contains(&v)).count();
        if around.len() != total || total == 0 {
            rep.push(format!("link of vertex `{}` is not a single cycle", cx.verts[v]));
        }
    }
    if !cx.is_connected() {
        rep.push("surface is not connected");
    }
    if let Some(g) = doc.genus {
        if cx.euler() != 2 - 2 * g {
            rep.push(format!("Euler characteristic {} does not match declared genus {g}", cx.euler()));
        }
    }
    if rep.is_ok() {
        Some(cx)
    } else {
        None
    }
}

pub fn validate_surface(doc: &ComplexDoc) -> ValidationReport {
    let mut rep = ValidationReport::default();
    if doc.schema != COMPLEX_V1 {
        rep.push(format!("schema `{}` is not {COMPLEX_V1}", doc.schema));
    }
    build(doc, &mut rep);
    rep
}

impl Complex {
    pub fn new(doc: &ComplexDoc) -> std::result::Result<Complex, ValidationReport> {
        let mut rep = ValidationReport::default();
        match build(doc, &mut rep) {
            Some(c) => Ok(c),
            None => Err(rep),
        }
    }

    pub fn lookup(&self, id: &str) -> Result<CellRef> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownCell(id.to_string()))
    }
    pub fn vertex(&self, id: &str) -> Result<usize> {
        match self.lookup(id)? {
            CellRef::V(v) => Ok(v),
            _ => Err(Error::Invalid(format!("`{id}` is not a vertex"))),
        }
    }
    pub fn edge(&self, id: &str) -> Result<usize> {
        match self.lookup(id)? {
            CellRef::E(v) => Ok(v),
            _ => Err(Error::Invalid(format!("`{id}` is not an edge"))),
        }
    }
    pub fn face(&self, id: &str) -> Result<usize> {
        match self.lookup(id)? {
            CellRef::F(v) => Ok(v),
            _ => Err(Error::Invalid(format!("`{id}` is not a 2-cell"))),
        }
    }
    pub fn id(&self, c: CellRef) -> &str {
        match c {
            CellRef::V(i) => &self.verts[i],
            CellRef::E(i) => &self.edges[i],
            CellRef::F(i) => &self.faces[i],
        }
    }
    pub fn has_fans(&self) -> bool {
        !self.fans.is_empty()
    }
    pub fn euler(&self) -> i64 {
        self.verts.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
    pub fn genus(&self) -> i64 {
        (2 - self.euler()) / 2
    }
    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edge_ends[e];
        if a == v {
            b
        } else {
            a
        }
    }
    pub fn vertex_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edge_ends[e].contains(&v)).collect()
    }
    /// (prev, next) vertices of v along the ccw boundary of f.
    pub fn corner(&self, f: usize, v: usize) -> Option<(usize, usize)> {
        corner(&self.face_verts[f], v)
    }
    /// Edges of f at corner v as (incoming, outgoing) along the ccw boundary.
    pub fn corner_edges(&self, f: usize, v: usize) -> Option<(usize, usize)> {
        let fv = &self.face_verts[f];
        let k = fv.len();
        let i = fv.iter().position(|&x| x == v)?;
        Some((self.face_edges[f][(i + k - 1) % k], self.face_edges[f][i]))
    }
    /// 2-cells around v in ccw order, starting from the smallest, derived from
    /// the orientation alone: the next 2-cell shares the incoming edge.
    pub fn faces_around(&self, v: usize) -> Vec<usize> {
        let start = (0..self.faces.len()).find(|&f| self.face_verts[f].contains(&v));
        let Some(start) = start else { return vec![] };
        let mut out = vec![start];
        let mut f = start;
        loop {
            let (inc, _) = self.corner_edges(f, v).unwrap();
            let [l, r] = self.edge_faces[inc];
            let g = if l == f { r } else { l };
            if g == start || out.len() > self.faces.len() {
                break;
            }
            out.push(g);
            f = g;
        }
        rotate_to_min(&out)
    }
    pub fn is_connected(&self) -> bool {
        let n = self.verts.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let adj: Vec<Vec<usize>> = {
            let mut a = vec![vec![]; n];
            for &[x, y] in &self.edge_ends {
                a[x].push(y);
                a[y].push(x);
            }
            a
        };
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
    /// Faces (codimension one) of a cell.
    pub fn boundary(&self, c: CellRef) -> Vec<CellRef> {
        match c {
            CellRef::V(_) => vec![],
            CellRef::E(e) => self.edge_ends[e].iter().map(|&v| CellRef::V(v)).collect(),
            CellRef::F(f) => self.face_edges[f].iter().map(|&e| CellRef::E(e)).collect(),
        }
    }
    /// τ ⊆ σ in the face poset.
    pub fn is_face_of(&self, t: CellRef, s: CellRef) -> bool {
        match (t, s) {
            (a, b) if a == b => true,
            (CellRef::V(v), CellRef::E(e)) => self.edge_ends[e].contains(&v),
            (CellRef::V(v), CellRef::F(f)) => self.face_verts[f].contains(&v),
            (CellRef::E(e), CellRef::F(f)) => self.face_edges[f].contains(&e),
            _ => false,
        }
    }
    pub fn all_cells(&self) -> Vec<CellRef> {
        let mut v: Vec<CellRef> = (0..self.verts.len()).map(CellRef::V).collect();
        v.extend((0..self.edges.len()).map(CellRef::E));
        v.extend((0..self.faces.len()).map(CellRef::F));
        v
    }

    /// Ray of edge e in the fan at v.
    pub fn ray(&self, v: usize, e: usize) -> Result<V2> {
        let fan = self.fans.get(v).ok_or_else(|| Error::Invalid("complex carries no fan data".into()))?;
        let i = fan
            .ray_of_edge(e)
            .ok_or_else(|| Error::Invalid(format!("edge `{}` is not incident to `{}`", self.edges[e], self.verts[v])))?;
        Ok(fan.rays[i])
    }
    /// +1 at the smaller endpoint of e, −1 at the larger: fixes one generator
    /// of the rank-1 quotient lattice along e.
    pub fn edge_sign(&self, v: usize, e: usize) -> i64 {
        if self.edge_ends[e][0] == v {
            1
        } else {
            -1
        }
    }
    /// Image of a vector (v coordinates) in the quotient ℤ² / ℤ·d along e,
    /// in the intrinsic orientation of the quotient.
    pub fn project_to_edge(&self, v: usize, e: usize, x: V2) -> Result<i64> {
        Ok(self.edge_sign(v, e) * det(self.ray(v, e)?, x))
    }
    /// Intrinsic edge-quotient pairing of a covector at v.
    pub fn quotient_slope_at(&self, v: usize, e: usize, m: V2) -> Result<i64> {
        Ok(self.edge_sign(v, e) * quotient_slope(&self.fans[v], e, m)?)
    }
}

/// Pairing of m with the transverse generator of the ray along `edge`
/// (local ccw convention of the fan).
pub fn quotient_slope(fan: &Fan, edge: usize, m: V2) -> Result<i64> {
    let i = fan.ray_of_edge(edge).ok_or_else(|| Error::Invalid("edge is not incident to the fan's vertex".into()))?;
    Ok(m.dot(transverse(fan.rays[i])))
}

pub fn check_standard_vertex(cx: &Complex, v: &str) -> Result<bool> {
    let v = cx.vertex(v)?;
    let fan = cx.fans.get(v).ok_or_else(|| Error::Invalid("complex carries no fan data".into()))?;
    Ok(is_standard_fan(&fan.rays))
}

/// GL(2,ℤ)-equivalent to the fan of ℙ²: three rays summing to zero, any two a basis.
pub fn is_standard_fan(rays: &[V2]) -> bool {
    rays.len() == 3
        && rays[0] + rays[1] + rays[2] == V2::ZERO
        && (0..3).all(|i| det(rays[i], rays[(i + 1) % 3]).abs() == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Flag {
    pub source: CellRef,
    pub target: CellRef,
}

/// Every inclusion τ ⊆ σ, identities included, in (target, source) order.
pub fn flags(cx: &Complex) -> Vec<Flag> {
    let mut out = vec![];
    for t in cx.all_cells() {
        for s in cx.all_cells() {
            if cx.is_face_of(s, t) {
                out.push(Flag { source: s, target: t });
            }
        }
    }
    out
}

pub fn compose(e1: Flag, e2: Flag) -> Result<Flag> {
    if e1.target != e2.source {
        return Err(Error::Invalid("flags are not composable".into()));
    }
    Ok(Flag { source: e1.source, target: e2.target })
}

/// Vertices ↔ 2-cells, edges kept; ids are preserved so the dual of the dual
/// has the original poset. No fan data is produced.
pub fn combinatorial_dual(cx: &Complex) -> ComplexDoc {
    let mut cells = vec![];
    for f in 0..cx.faces.len() {
        cells.push(CellDoc { id: cx.faces[f].clone(), dim: 0, faces: vec![], singular: vec![] });
    }
    for e in 0..cx.edges.len() {
        let mut fs: Vec<String> = cx.edge_faces[e].iter().map(|&f| cx.faces[f].clone()).collect();
        fs.sort();
        cells.push(CellDoc { id: cx.edges[e].clone(), dim: 1, faces: fs, singular: cx.singular[e].clone() });
    }
    let mut orientation = vec![];
    for v in 0..cx.verts.len() {
        let mut es: Vec<String> = cx.vertex_edges(v).into_iter().map(|e| cx.edges[e].clone()).collect();
        es.sort();
        cells.push(CellDoc { id: cx.verts[v].clone(), dim: 2, faces: es, singular: vec![] });
        let around = cx.faces_around(v);
        orientation.push(OrientationDoc {
            face: cx.verts[v].clone(),
            boundary: around.iter().map(|&f| cx.faces[f].clone()).collect(),
        });
    }
    cells.sort_by(|a, b| (a.dim, &a.id).cmp(&(b.dim, &b.id)));
    ComplexDoc {
        schema: COMPLEX_V1.into(),
        cells,
        fans: vec![],
        orientation,
        asserted: cx.doc.asserted.clone(),
        genus: Some(cx.genus()),
        tags: vec!["dual-no-fans".into()],
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::schema::{ConeDoc, FanDoc, RayDoc};

    /// Boundary of a tetrahedron with ℙ²-type fans (as an octahedron's dual
    /// would not be trivalent; the tetrahedron is).
    pub fn tetrahedron() -> ComplexDoc {
        // vertices a,b,c,d; faces opposite each vertex
        let vs = ["a", "b", "c", "d"];
        let mut cells: Vec<CellDoc> =
            vs.iter().map(|v| CellDoc { id: v.to_string(), dim: 0, faces: vec![], singular: vec![] }).collect();
        let pairs = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")];
        let eid = |x: &str, y: &str| format!("{}{}", x.min(y), x.max(y));
        for (x, y) in pairs {
            cells.push(CellDoc { id: eid(x, y), dim: 1, faces: vec![x.into(), y.into()], singular: vec![] });
        }
        // ccw (outward normal) triangles
        let tris = [("fa", ["b", "d", "c"]), ("fb", ["a", "c", "d"]), ("fc", ["a", "d", "b"]), ("fd", ["a", "b", "c"])];
        let mut orientation = vec![];
        for (f, t) in tris {
            let faces = (0..3).map(|i| eid(t[i], t[(i + 1) % 3])).collect();
            cells.push(CellDoc { id: f.into(), dim: 2, faces, singular: vec![] });
            orientation.push(OrientationDoc { face: f.into(), boundary: t.iter().map(|s| s.to_string()).collect() });
        }
        // fans: at each vertex, three edges; order them ccw around the vertex
        let mut doc = ComplexDoc {
            schema: COMPLEX_V1.into(),
            cells,
            fans: vec![],
            orientation,
            asserted: Default::default(),
            genus: Some(0),
            tags: vec!["dual-no-fans".into()],
        };
        let cx = Complex::new(&doc).expect("combinatorially valid");
        let p2 = [V2::new(1, 0), V2::new(0, 1), V2::new(-1, -1)];
        let mut fans = vec![];
        for v in 0..4 {
            let around = cx.faces_around(v);
            // cone i between ray i and ray i+1: ray i is the outgoing edge of face i
            let rays: Vec<RayDoc> = around
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    let (_, out) = cx.corner_edges(f, v).unwrap();
                    RayDoc { vec: p2[i].0, edge: cx.edges[out].clone() }
                })
                .collect();
            let cones = around
                .iter()
                .enumerate()
                .map(|(i, &f)| ConeDoc { face2: cx.faces[f].clone(), rays: [i, (i + 1) % 3] })
                .collect();
            fans.push(FanDoc { vertex: cx.verts[v].clone(), rays, cones });
        }
        doc.fans = fans;
        doc.tags.clear();
        doc
    }

    #[test]
    fn tetrahedron_is_valid() {
        let doc = tetrahedron();
        let rep = validate_surface(&doc);
        assert!(rep.is_ok(), "{rep}");
        let cx = Complex::new(&doc).unwrap();
        assert_eq!(cx.euler(), 2);
        for v in &cx.verts {
            assert!(check_standard_vertex(&cx, v).unwrap());
        }
        assert!(check_standard_vertex(&cx, "zz").is_err());
    }

    #[test]
    fn open_triangle_has_one_coface_edges() {
        let mut cells: Vec<CellDoc> =
            ["a", "b", "c"].iter().map(|v| CellDoc { id: v.to_string(), dim: 0, faces: vec![], singular: vec![] }).collect();
        for (e, x, y) in [("ab", "a", "b"), ("bc", "b", "c"), ("ac", "a", "c")] {
            cells.push(CellDoc { id: e.into(), dim: 1, faces: vec![x.into(), y.into()], singular: vec![] });
        }
        cells.push(CellDoc { id: "t".into(), dim: 2, faces: vec!["ab".into(), "bc".into(), "ac".into()], singular: vec![] });
        let doc = ComplexDoc {
            schema: COMPLEX_V1.into(),
            cells,
            fans: vec![],
            orientation: vec![OrientationDoc { face: "t".into(), boundary: vec!["a".into(), "b".into(), "c".into()] }],
            asserted: Default::default(),
            genus: None,
            tags: vec![],
        };
        let rep = validate_surface(&doc);
        assert!(rep.contains("edge with one coface"), "{rep}");
    }

    #[test]
    fn incomplete_fan_reported() {
        let mut doc = tetrahedron();
        let f = &mut doc.fans[0];
        f.rays.pop();
        f.cones.pop();
        f.rays[0].vec = [1, 0];
        f.rays[1].vec = [0, 1];
        f.cones[1].rays = [1, 0];
        let rep = validate_surface(&doc);
        assert!(rep.contains("fan not complete"), "{rep}");
    }

    #[test]
    fn standard_fan_examples() {
        let v = |a, b| V2::new(a, b);
        assert!(is_standard_fan(&[v(1, 0), v(0, 1), v(-1, -1)]));
        assert!(!is_standard_fan(&[v(1, 0), v(0, 1), v(-1, 0), v(0, -1)]));
        assert!(is_standard_fan(&[v(1, 1), v(0, -1), v(-1, 0)]));
    }

    #[test]
    fn flags_of_a_triangle() {
        let cx = Complex::new(&tetrahedron()).unwrap();
        let fl = flags(&cx);
        let f = CellRef::F(0);
        assert_eq!(fl.iter().filter(|x| x.target == f).count(), 7);
        let v = CellRef::V(cx.face_verts[0][0]);
        let e = CellRef::E(cx.face_edges[0][0]);
        let c = compose(Flag { source: v, target: e }, Flag { source: e, target: f }).unwrap();
        assert_eq!(c, Flag { source: v, target: f });
        assert!(compose(Flag { source: v, target: e }, Flag { source: f, target: f }).is_err());
        // vertex-to-2-cell flags number the corners
        let corners: usize = cx.face_verts.iter().map(|c| c.len()).sum();
        assert_eq!(fl.iter().filter(|x| x.source.dim() == 0 && x.target.dim() == 2).count(), corners);
    }

    #[test]
    fn quotient_slope_examples() {
        let fan = Fan { rays: vec![V2::new(1, 0), V2::new(1, 1), V2::new(-2, -1)], ray_edges: vec![0, 1, 2], cone_faces: vec![0, 1, 2] };
        assert_eq!(quotient_slope(&fan, 0, V2::new(3, -7)).unwrap(), -7);
        assert_eq!(quotient_slope(&fan, 0, V2::ZERO).unwrap(), 0);
        // brute force: any t with det(d, t) = 1 pairs the same against m ⊥ d shifts
        let m = V2::new(2, -3);
        assert_eq!(quotient_slope(&fan, 1, m).unwrap(), -3);
        assert!(quotient_slope(&fan, 9, m).is_err());
    }

    #[test]
    fn dual_of_dual() {
        let cx = Complex::new(&tetrahedron()).unwrap();
        let d = combinatorial_dual(&cx);
        let dcx = Complex::new(&d).expect("dual is valid");
        assert_eq!((dcx.verts.len(), dcx.edges.len(), dcx.faces.len()), (4, 6, 4));
        let dd = combinatorial_dual(&dcx);
        let norm = |doc: &ComplexDoc| {
            let mut v: Vec<(u8, String, Vec<String>)> = doc
                .cells
                .iter()
                .map(|c| {
                    let mut f = c.faces.clone();
                    f.sort();
                    (c.dim, c.id.clone(), f)
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(norm(&dd), norm(&cx.doc));
        let ddcx = Complex::new(&dd).unwrap();
        assert_eq!(ddcx.face_verts, cx.face_verts);
    }
}
