//! Branched covers L → B with slope data: the multi-section 𝕃.
//!
//! Lifts are indexed per dimension in lexicographic id order. Slopes live on
//! corners (vertex lift, face lift) in the fan coordinates of the base vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::affine_complex::{is_standard_fan, CellRef, Complex, ValidationReport};
use crate::chern::PlFunction;
use crate::error::{pre, Error, Result};
use crate::lattice::{det, Mat2, V2};
use crate::local_model::{kink, kink_step, phi_mn_cycle, RAYS};
use crate::schema::{
    LiftDoc, MatchingDoc, MultiSectionDoc, RamificationDoc, SlopeDoc, MULTISECTION_V1,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedEdge {
    pub base: usize,
    /// vertex lifts over edge_ends[0] and edge_ends[1]
    pub ends: [usize; 2],
    /// face lifts over the left and right base faces
    pub faces: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedFace {
    pub base: usize,
    /// aligned with the base face_edges / face_verts
    pub edges: Vec<usize>,
    pub verts: Vec<usize>,
}

/// One corner of the link of a vertex lift, listed ccw. Leaving the corner
/// counterclockwise crosses `edge` (an edge lift) over fan ray `ray`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Corner {
    pub face: usize,
    pub cone: usize,
    pub edge: usize,
    pub ray: usize,
}

#[derive(Clone, Debug)]
pub struct Cover {
    pub doc: MultiSectionDoc,
    pub base: Complex,
    pub degree: usize,
    pub vert_ids: Vec<String>,
    pub edge_ids: Vec<String>,
    pub face_ids: Vec<String>,
    pub vert_base: Vec<usize>,
    pub edges: Vec<LiftedEdge>,
    pub faces: Vec<LiftedFace>,
    pub vlifts: Vec<Vec<usize>>,
    pub elifts: Vec<Vec<usize>>,
    pub flifts: Vec<Vec<usize>>,
    pub branch: Vec<bool>,
    pub ramification: Vec<Vec<Vec<usize>>>,
    pub corners: Vec<Vec<Corner>>,
    pub slopes: HashMap<(usize, usize), V2>,
}

struct Idx {
    ids: [Vec<String>; 3],
    base: [Vec<usize>; 3],
    faces: [Vec<Vec<String>>; 3],
    map: HashMap<String, (usize, usize)>,
}

fn index_lifts(doc: &MultiSectionDoc, base: &Complex, rep: &mut ValidationReport) -> Idx {
    let mut by_dim: [Vec<&LiftDoc>; 3] = [vec![], vec![], vec![]];
    let mut seen = BTreeSet::new();
    for l in &doc.lifts {
        if !seen.insert(l.id.clone()) {
            rep.push(format!("duplicate lift id `{}`", l.id));
            continue;
        }
        match base.lookup(&l.base) {
            Ok(c) => by_dim[c.dim() as usize].push(l),
            Err(_) => rep.push(format!("lift `{}` covers unknown cell `{}`", l.id, l.base)),
        }
    }
    for v in by_dim.iter_mut() {
        v.sort_by(|a, b| a.id.cmp(&b.id));
    }
    let mut map = HashMap::new();
    let mut ids: [Vec<String>; 3] = Default::default();
    let mut bases: [Vec<usize>; 3] = Default::default();
    let mut faces: [Vec<Vec<String>>; 3] = Default::default();
    for d in 0..3 {
        for (i, l) in by_dim[d].iter().enumerate() {
            map.insert(l.id.clone(), (d, i));
            ids[d].push(l.id.clone());
            let b = match base.lookup(&l.base).unwrap() {
                CellRef::V(x) | CellRef::E(x) | CellRef::F(x) => x,
            };
            bases[d].push(b);
            faces[d].push(l.faces.clone());
        }
    }
    Idx { ids, base: bases, faces, map }
}

fn uf_find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

fn build(doc: &MultiSectionDoc, rep: &mut ValidationReport) -> Option<Cover> {
    if doc.schema != MULTISECTION_V1 {
        rep.push(format!("schema `{}` is not {MULTISECTION_V1}", doc.schema));
    }
    let base = match Complex::new(&doc.complex()) {
        Ok(b) => b,
        Err(r) => {
            for v in r.violations {
                rep.push(format!("base: {v}"));
            }
            return None;
        }
    };
    if !base.has_fans() {
        rep.push("base carries no fan data");
        return None;
    }
    let r = doc.degree;
    if r == 0 {
        rep.push("degree must be at least 1");
        return None;
    }
    let ix = index_lifts(doc, &base, rep);
    let (nv, ne, nf) = (base.verts.len(), base.edges.len(), base.faces.len());
    let mut vlifts = vec![vec![]; nv];
    let mut elifts = vec![vec![]; ne];
    let mut flifts = vec![vec![]; nf];
    for (i, &b) in ix.base[0].iter().enumerate() {
        vlifts[b].push(i);
    }
    for (i, &b) in ix.base[1].iter().enumerate() {
        elifts[b].push(i);
    }
    for (i, &b) in ix.base[2].iter().enumerate() {
        flifts[b].push(i);
    }
    for (v, l) in vlifts.iter().enumerate() {
        if l.is_empty() || l.len() > r {
            rep.push(format!("vertex `{}` has {} lifts, expected 1..={r}", base.verts[v], l.len()));
        }
        if l.iter().any(|&i| !ix.faces[0][i].is_empty()) {
            rep.push(format!("a lift of vertex `{}` lists faces", base.verts[v]));
        }
    }
    for (e, l) in elifts.iter().enumerate() {
        if l.len() != r {
            rep.push(format!("edge `{}` has {} lifts, expected {r}", base.edges[e], l.len()));
        }
    }
    for (f, l) in flifts.iter().enumerate() {
        if l.len() != r {
            rep.push(format!("2-cell `{}` has {} lifts, expected {r}", base.faces[f], l.len()));
        }
    }
    if !rep.is_ok() {
        return None;
    }
    // edge lift endpoints
    let mut ends = vec![[usize::MAX; 2]; ix.ids[1].len()];
    for (i, fs) in ix.faces[1].iter().enumerate() {
        let e = ix.base[1][i];
        let mut got = vec![];
        for f in fs {
            match ix.map.get(f) {
                Some(&(0, j)) => got.push(j),
                _ => rep.push(format!("edge lift `{}` has face `{f}` which is not a vertex lift", ix.ids[1][i])),
            }
        }
        let [a, b] = base.edge_ends[e];
        let at = |v: usize| got.iter().copied().filter(|&j| ix.base[0][j] == v).collect::<Vec<_>>();
        let (ga, gb) = (at(a), at(b));
        if got.len() != 2 || ga.len() != 1 || gb.len() != 1 {
            rep.push(format!(
                "edge lift `{}` must join one lift of `{}` to one lift of `{}`",
                ix.ids[1][i], base.verts[a], base.verts[b]
            ));
        } else {
            ends[i] = [ga[0], gb[0]];
        }
    }
    // face lift boundaries
    let mut faces = vec![];
    for (i, fs) in ix.faces[2].iter().enumerate() {
        let f = ix.base[2][i];
        let mut by_base: HashMap<usize, usize> = HashMap::new();
        for x in fs {
            match ix.map.get(x) {
                Some(&(1, j)) => {
                    if by_base.insert(ix.base[1][j], j).is_some() {
                        rep.push(format!("face lift `{}` has two lifts of one edge", ix.ids[2][i]));
                    }
                }
                _ => rep.push(format!("face lift `{}` has face `{x}` which is not an edge lift", ix.ids[2][i])),
            }
        }
        let want: BTreeSet<usize> = base.face_edges[f].iter().copied().collect();
        if by_base.keys().copied().collect::<BTreeSet<_>>() != want || fs.len() != want.len() {
            rep.push(format!(
                "face lift `{}` must contain exactly one lift of each edge of `{}`",
                ix.ids[2][i], base.faces[f]
            ));
            faces.push(LiftedFace { base: f, edges: vec![], verts: vec![] });
            continue;
        }
        let edges: Vec<usize> = base.face_edges[f].iter().map(|e| by_base[e]).collect();
        let k = edges.len();
        let mut verts = vec![];
        for j in 0..k {
            let v = base.face_verts[f][j];
            let end_at = |el: usize| {
                let e = ix.base[1][el];
                let s = if base.edge_ends[e][0] == v { 0 } else { 1 };
                ends[el][s]
            };
            let (a, b) = (end_at(edges[(j + k - 1) % k]), end_at(edges[j]));
            if a != b {
                rep.push(format!(
                    "face lift `{}`: its edge lifts do not meet at a common lift of `{}`",
                    ix.ids[2][i], base.verts[v]
                ));
            }
            verts.push(b);
        }
        faces.push(LiftedFace { base: f, edges, verts });
    }
    if !rep.is_ok() {
        return None;
    }
    // cofaces of edge lifts
    let mut efaces = vec![[usize::MAX; 2]; ix.ids[1].len()];
    for (fi, lf) in faces.iter().enumerate() {
        for &el in &lf.edges {
            let e = ix.base[1][el];
            let side = if base.edge_faces[e][0] == lf.base { 0 } else { 1 };
            if efaces[el][side] != usize::MAX {
                rep.push(format!("edge lift `{}` bounds two lifts of one 2-cell", ix.ids[1][el]));
            }
            efaces[el][side] = fi;
        }
    }
    for (el, fs) in efaces.iter().enumerate() {
        if fs.contains(&usize::MAX) {
            rep.push(format!("edge lift `{}` does not have two cofaces", ix.ids[1][el]));
        }
    }
    if !rep.is_ok() {
        return None;
    }
    let edges: Vec<LiftedEdge> =
        (0..ix.ids[1].len()).map(|i| LiftedEdge { base: ix.base[1][i], ends: ends[i], faces: efaces[i] }).collect();
    // matchings are redundant with the face lists and must agree
    for md in &doc.matchings {
        let (Ok(e), Ok(f)) = (base.edge(&md.edge), base.face(&md.face)) else {
            rep.push(format!("matching names unknown cells `{}`, `{}`", md.edge, md.face));
            continue;
        };
        if !base.edge_faces[e].contains(&f) {
            rep.push(format!("matching: `{}` is not a side of `{}`", md.face, md.edge));
            continue;
        }
        let side = if base.edge_faces[e][0] == f { 0 } else { 1 };
        let mut got = BTreeSet::new();
        for [a, b] in &md.pairs {
            match (ix.map.get(a), ix.map.get(b)) {
                (Some(&(1, el)), Some(&(2, fl))) if edges[el].base == e && edges[el].faces[side] == fl => {
                    got.insert(el);
                }
                _ => rep.push(format!("matching pair (`{a}`, `{b}`) over `{}` contradicts the lifted incidence", md.edge)),
            }
        }
        if got.len() != r {
            rep.push(format!("matching over (`{}`, `{}`) does not list every lift", md.edge, md.face));
        }
    }
    // corners: link of each vertex lift
    let mut corner_of: HashMap<(usize, usize), usize> = HashMap::new(); // (vertex lift, face lift) → position
    let mut corners = vec![vec![]; ix.ids[0].len()];
    let mut total_corners = vec![0usize; ix.ids[0].len()];
    for lf in &faces {
        for &v in &lf.verts {
            total_corners[v] += 1;
        }
    }
    for vl in 0..ix.ids[0].len() {
        let v = ix.base[0][vl];
        let fan = &base.fans[v];
        let start = (0..faces.len()).find(|&fl| faces[fl].verts.contains(&vl) && base.face_verts[faces[fl].base].contains(&v));
        let Some(start) = start else {
            rep.push(format!("vertex lift `{}` lies on no face lift", ix.ids[0][vl]));
            continue;
        };
        let mut cur = start;
        let mut list = vec![];
        loop {
            let lf = &faces[cur];
            let f = lf.base;
            let pos = base.face_verts[f].iter().position(|&x| x == v).unwrap();
            if lf.verts[pos] != vl {
                break;
            }
            let k = lf.edges.len();
            let inc = lf.edges[(pos + k - 1) % k];
            let cone = fan.cone_of_face(f).unwrap();
            let ray = (cone + 1) % fan.len();
            list.push(Corner { face: cur, cone, edge: inc, ray });
            let [a, b] = edges[inc].faces;
            cur = if a == cur { b } else { a };
            if cur == start || list.len() > total_corners[vl] {
                break;
            }
        }
        if list.len() != total_corners[vl] || cur != start {
            rep.push(format!("link of vertex lift `{}` is not a single cycle", ix.ids[0][vl]));
        }
        let nfaces = fan.len();
        if list.len() % nfaces != 0 {
            rep.push(format!("vertex lift `{}` does not cover its base star evenly", ix.ids[0][vl]));
        }
        for (i, c) in list.iter().enumerate() {
            corner_of.insert((vl, c.face), i);
        }
        corners[vl] = list;
    }
    if !rep.is_ok() {
        return None;
    }
    let local_degree = |vl: usize| corners[vl].len() / base.fans[ix.base[0][vl]].len();
    for v in 0..nv {
        let s: usize = vlifts[v].iter().map(|&vl| local_degree(vl)).sum();
        if s != r {
            rep.push(format!("local degrees over `{}` sum to {s}, expected {r}", base.verts[v]));
        }
    }
    // lifts of one cell may only meet at ramified points
    for e in 0..ne {
        for (i, &a) in elifts[e].iter().enumerate() {
            for &b in &elifts[e][i + 1..] {
                for s in 0..2 {
                    let x = edges[a].ends[s];
                    if x == edges[b].ends[s] && local_degree(x) == 1 {
                        rep.push(format!(
                            "two lifts of edge `{}` meet at unramified vertex lift `{}`",
                            base.edges[e], ix.ids[0][x]
                        ));
                    }
                }
            }
        }
    }
    // branch set
    let mut branch = vec![false; nv];
    for b in &doc.branch {
        match base.lookup(b) {
            Ok(CellRef::V(v)) => branch[v] = true,
            Ok(_) => rep.push(format!("branch point over `{b}` is not a vertex (S ⊄ B⁽⁰⁾)")),
            Err(_) => rep.push(format!("branch set names unknown cell `{b}`")),
        }
    }
    for v in 0..nv {
        let ramified = vlifts[v].iter().any(|&vl| local_degree(vl) > 1);
        if ramified != branch[v] {
            rep.push(format!(
                "vertex `{}` is {} but {} in the branch set",
                base.verts[v],
                if ramified { "ramified" } else { "unramified" },
                if branch[v] { "listed" } else { "not listed" }
            ));
        }
    }
    let mut ramification = vec![vec![]; nv];
    for rd in &doc.ramification {
        let Ok(v) = base.vertex(&rd.vertex) else {
            rep.push(format!("ramification entry for unknown vertex `{}`", rd.vertex));
            continue;
        };
        let mut all: Vec<usize> = rd.cycles.iter().flatten().copied().collect();
        all.sort();
        if all != (1..=r).collect::<Vec<_>>() {
            rep.push(format!("ramification at `{}` is not a partition of the sheets 1..{r}", rd.vertex));
        }
        let mut declared: Vec<usize> = rd.cycles.iter().map(|c| c.len()).collect();
        let mut actual: Vec<usize> = vlifts[v].iter().map(|&vl| local_degree(vl)).collect();
        declared.sort();
        actual.sort();
        if declared != actual {
            rep.push(format!("ramification at `{}` does not match the lifted cells", rd.vertex));
        }
        let long: Vec<usize> = declared.iter().copied().filter(|&l| l > 1).collect();
        if !(long == [2] || long == [r]) {
            rep.push(format!(
                "ramification at `{}` is neither simple (one 2-cycle) nor total (one {r}-cycle)",
                rd.vertex
            ));
        }
        ramification[v] = rd.cycles.clone();
    }
    for v in 0..nv {
        if branch[v] && ramification[v].is_empty() {
            rep.push(format!("branch vertex `{}` has no ramification entry", base.verts[v]));
        }
    }
    // connectedness of L
    let mut parent: Vec<usize> = (0..ix.ids[0].len()).collect();
    for el in &edges {
        let (a, b) = (uf_find(&mut parent, el.ends[0]), uf_find(&mut parent, el.ends[1]));
        parent[a] = b;
    }
    let roots: BTreeSet<usize> = (0..ix.ids[0].len()).map(|x| uf_find(&mut parent, x)).collect();
    if roots.len() != 1 {
        rep.push(format!("L is disconnected ({} components)", roots.len()));
    }
    // slopes
    let mut slopes = HashMap::new();
    for sd in &doc.slopes {
        match (ix.map.get(&sd.vertex), ix.map.get(&sd.face)) {
            (Some(&(0, vl)), Some(&(2, fl))) => {
                if !corner_of.contains_key(&(vl, fl)) {
                    rep.push(format!("slope on (`{}`, `{}`) which is not a corner", sd.vertex, sd.face));
                } else if slopes.insert((vl, fl), V2(sd.m)).is_some() {
                    rep.push(format!("slope on (`{}`, `{}`) given twice", sd.vertex, sd.face));
                }
            }
            _ => rep.push(format!("slope names unknown lifts `{}`, `{}`", sd.vertex, sd.face)),
        }
    }
    for vl in 0..ix.ids[0].len() {
        for c in &corners[vl] {
            if !slopes.contains_key(&(vl, c.face)) {
                rep.push(format!("missing slope at vertex lift `{}` on `{}`", ix.ids[0][vl], ix.ids[2][c.face]));
            }
        }
    }
    if !rep.is_ok() {
        return None;
    }
    // continuity at unramified vertex lifts; ramified ones are checked by classify
    for vl in 0..ix.ids[0].len() {
        if local_degree(vl) != 1 {
            continue;
        }
        let v = ix.base[0][vl];
        let cs = &corners[vl];
        for i in 0..cs.len() {
            let (a, b) = (cs[i], cs[(i + 1) % cs.len()]);
            let d = base.fans[v].rays[a.ray];
            if (slopes[&(vl, a.face)] - slopes[&(vl, b.face)]).dot(d) != 0 {
                rep.push(format!(
                    "slopes at vertex lift `{}` disagree on the ray along `{}`",
                    ix.ids[0][vl], base.edges[base.fans[v].ray_edges[a.ray]]
                ));
            }
        }
    }
    if !rep.is_ok() {
        return None;
    }
    let [vid, eid, fid] = ix.ids;
    Some(Cover {
        doc: doc.clone(),
        base,
        degree: r,
        vert_ids: vid,
        edge_ids: eid,
        face_ids: fid,
        vert_base: ix.base[0].clone(),
        edges,
        faces,
        vlifts,
        elifts,
        flifts,
        branch,
        ramification,
        corners,
        slopes,
    })
}

pub fn validate_cover(doc: &MultiSectionDoc) -> ValidationReport {
    let mut rep = ValidationReport::default();
    build(doc, &mut rep);
    rep
}

impl Cover {
    pub fn new(doc: &MultiSectionDoc) -> std::result::Result<Cover, ValidationReport> {
        let mut rep = ValidationReport::default();
        build(doc, &mut rep).ok_or(rep)
    }

    pub fn local_degree(&self, vl: usize) -> usize {
        self.corners[vl].len() / self.base.fans[self.vert_base[vl]].len()
    }
    pub fn slope(&self, vl: usize, fl: usize) -> V2 {
        self.slopes[&(vl, fl)]
    }
    pub fn branch_vertices(&self) -> Vec<usize> {
        (0..self.base.verts.len()).filter(|&v| self.branch[v]).collect()
    }
    pub fn euler(&self) -> i64 {
        self.vert_ids.len() as i64 - self.edge_ids.len() as i64 + self.face_ids.len() as i64
    }
    /// The lift of base face f through vertex lift vl on the given sheet
    /// ordering: face lifts of f containing vl.
    pub fn face_lifts_at(&self, vl: usize, f: usize) -> Vec<usize> {
        self.corners[vl].iter().filter(|c| self.faces[c.face].base == f).map(|c| c.face).collect()
    }
    /// At an unramified vertex lift: the PL function on the base fan.
    pub fn local_function(&self, vl: usize) -> Result<PlFunction> {
        if self.local_degree(vl) != 1 {
            return pre(format!("vertex lift `{}` is ramified", self.vert_ids[vl]));
        }
        let v = self.vert_base[vl];
        let fan = &self.base.fans[v];
        let mut slopes = vec![V2::ZERO; fan.len()];
        for c in &self.corners[vl] {
            slopes[c.cone] = self.slope(vl, c.face);
        }
        PlFunction::new(fan.rays.clone(), slopes)
    }
    /// Kinks met walking once around a vertex lift, in corner order.
    pub fn kinks(&self, vl: usize) -> Vec<i64> {
        let v = self.vert_base[vl];
        let cs = &self.corners[vl];
        (0..cs.len())
            .map(|i| {
                let (a, b) = (cs[i], cs[(i + 1) % cs.len()]);
                kink(self.base.fans[v].rays[a.ray], self.slope(vl, a.face), self.slope(vl, b.face))
            })
            .collect()
    }
    /// Kink along an edge lift seen from its endpoint on side `s`, in the
    /// orientation where the left face lift is on the clockwise side at the
    /// smaller endpoint.
    pub fn edge_kink(&self, el: usize, s: usize) -> i64 {
        let le = &self.edges[el];
        let vl = le.ends[s];
        let v = self.vert_base[vl];
        let ray = self.base.ray(v, le.base).unwrap();
        let (l, r) = (self.slope(vl, le.faces[0]), self.slope(vl, le.faces[1]));
        // at the smaller endpoint, going ccw crosses from the right face to the left
        if s == 0 {
            kink(ray, r, l)
        } else {
            kink(ray, l, r)
        }
    }
    /// Edge lifts whose kink differs between the two endpoints.
    pub fn edge_kink_mismatches(&self) -> Vec<String> {
        (0..self.edges.len())
            .filter(|&el| self.edge_kink(el, 0) != self.edge_kink(el, 1))
            .map(|el| {
                format!(
                    "edge lift `{}`: kink {} at `{}` but {} at `{}`",
                    self.edge_ids[el],
                    self.edge_kink(el, 0),
                    self.vert_ids[self.edges[el].ends[0]],
                    self.edge_kink(el, 1),
                    self.vert_ids[self.edges[el].ends[1]]
                )
            })
            .collect()
    }
    pub fn lift_index(&self, id: &str) -> Option<(usize, usize)> {
        if let Ok(i) = self.vert_ids.binary_search_by(|x| x.as_str().cmp(id)) {
            return Some((0, i));
        }
        if let Ok(i) = self.edge_ids.binary_search_by(|x| x.as_str().cmp(id)) {
            return Some((1, i));
        }
        self.face_ids.binary_search_by(|x| x.as_str().cmp(id)).ok().map(|i| (2, i))
    }
}

pub fn euler_genus(c: &Cover) -> Result<i64> {
    let chi = c.euler();
    if chi % 2 != 0 {
        return Err(Error::Internal(format!("odd Euler characteristic {chi}")));
    }
    Ok((2 - chi) / 2)
}

pub fn riemann_hurwitz_genus(num_branch: i64) -> Result<i64> {
    if num_branch <= 0 || num_branch % 2 != 0 {
        return pre(format!("branch count {num_branch} must be even and positive"));
    }
    Ok(num_branch / 2 - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClassTag {
    S,
    Smn(i64, i64),
    C,
    None,
}

impl std::fmt::Display for ClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassTag::S => write!(f, "S"),
            ClassTag::Smn(m, n) => write!(f, "S_{{{m},{n}}}"),
            ClassTag::C => write!(f, "C"),
            ClassTag::None => write!(f, "none"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClass {
    pub vertex: String,
    pub standard: bool,
    /// (m, n) read off with the first corner on the + sheet of σ_0
    pub pair: Option<(i64, i64)>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub tag: ClassTag,
    pub vertices: Vec<VertexClass>,
    pub reasons: Vec<String>,
}

/// Match the six corners of a double point against φ_{m,n}: choose the
/// GL(2,ℤ) map taking the first three crossed rays to v_2, v_0, v_1, move the
/// slopes contragrediently, read (m, n) off two differences and check the
/// remaining corners against the model plus one shift.
pub fn match_double_point(rays: &[V2], crossed: &[V2], slopes: &[V2]) -> std::result::Result<(i64, i64), String> {
    if !is_standard_fan(rays) {
        return Err("fan is not standard".into());
    }
    if slopes.len() != 6 || crossed.len() != 6 {
        return Err(format!("expected 6 corners, found {}", slopes.len()));
    }
    for i in 0..6 {
        if (slopes[(i + 1) % 6] - slopes[i]).dot(crossed[i]) != 0 {
            return Err("not a PL representative: slopes disagree on a shared ray".into());
        }
    }
    let src = Mat2::from_cols(crossed[0], crossed[1]);
    let g = Mat2::from_cols(RAYS[2], RAYS[0]).mul(&src.inverse_unimodular().ok_or("crossed rays are not a basis")?);
    if g.apply(crossed[2]) != RAYS[1] {
        return Err("crossed rays do not follow the fan's cyclic order".into());
    }
    let s: Vec<V2> = slopes.iter().map(|&m| g.cotransform(m).unwrap()).collect();
    let d1 = s[1] - s[0];
    let d2 = s[2] - s[1];
    if d1.y() != 0 || d2.x() != -d2.y() {
        return Err("slopes do not match the local model".into());
    }
    let (m, n) = (d1.x(), d2.y());
    if m == n {
        return Err(format!("degenerate pair m = n = {m}"));
    }
    let model = phi_mn_cycle(m, n);
    let shift = s[0] - model[0];
    if (0..6).any(|i| s[i] != model[i] + shift) {
        return Err("slopes do not match the local model".into());
    }
    Ok((m, n))
}

pub fn classify(c: &Cover) -> Classification {
    let mut vertices = vec![];
    let mut reasons = vec![];
    let mut pairs = BTreeSet::new();
    let mut all_double = true;
    for v in c.branch_vertices() {
        let fan = &c.base.fans[v];
        let standard = is_standard_fan(&fan.rays);
        let ram = c.vlifts[v].iter().copied().find(|&vl| c.local_degree(vl) > 1);
        let mut vc = VertexClass { vertex: c.base.verts[v].clone(), standard, pair: None, reason: None };
        match ram {
            Some(vl) if c.local_degree(vl) == 2 => {
                let cs = &c.corners[vl];
                let crossed: Vec<V2> = cs.iter().map(|x| fan.rays[x.ray]).collect();
                let slopes: Vec<V2> = cs.iter().map(|x| c.slope(vl, x.face)).collect();
                match match_double_point(&fan.rays, &crossed, &slopes) {
                    Ok((m, n)) => {
                        // independent route: kinks along the cycle alternate −m, −n
                        let ks = c.kinks(vl);
                        let expect: Vec<i64> = (0..6).map(|i| if i % 2 == 0 { -m } else { -n }).collect();
                        if ks != expect {
                            vc.reason = Some(format!("kink sequence {ks:?} disagrees with the extracted pair"));
                        } else {
                            vc.pair = Some((m, n));
                            pairs.insert((m.max(n), m.min(n)));
                        }
                    }
                    Err(e) => vc.reason = Some(e),
                }
            }
            _ => {
                all_double = false;
                vc.reason = Some("not a simple double point".into());
            }
        }
        if let Some(r) = &vc.reason {
            reasons.push(format!("`{}`: {r}", vc.vertex));
        }
        vertices.push(vc);
    }
    let tag = if reasons.is_empty() {
        if pairs.len() == 1 {
            let (m, n) = *pairs.iter().next().unwrap();
            ClassTag::Smn(m, n)
        } else {
            ClassTag::S
        }
    } else if !all_double && c.branch_vertices().iter().all(|&v| c.vlifts[v].len() == 1) && check_class_c(c).holds {
        reasons.clear();
        ClassTag::C
    } else {
        ClassTag::None
    };
    Classification { tag, vertices, reasons }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCReport {
    pub holds: bool,
    pub failures: Vec<String>,
}

/// u pairs nonnegatively with both rays of the cone.
pub fn in_dual_cone(u: V2, a: V2, b: V2) -> bool {
    u.dot(a) >= 0 && u.dot(b) >= 0
}

pub fn check_class_c(c: &Cover) -> ClassCReport {
    let mut failures = vec![];
    for v in c.branch_vertices() {
        let vid = &c.base.verts[v];
        if c.vlifts[v].len() != 1 {
            failures.push(format!("`{vid}` is not totally ramified"));
            continue;
        }
        let vl = c.vlifts[v][0];
        let fan = &c.base.fans[v];
        let k = fan.len();
        for cone in 0..k {
            let f = fan.cone_faces[cone];
            let lifts = c.face_lifts_at(vl, f);
            let (a, b) = (fan.rays[cone], fan.rays[(cone + 1) % k]);
            for (i, &x) in lifts.iter().enumerate() {
                for &y in &lifts[i + 1..] {
                    let d = c.slope(vl, x) - c.slope(vl, y);
                    if d.is_zero() {
                        failures.push(format!(
                            "`{vid}`: equal slopes on `{}` and `{}` (condition 1)",
                            c.face_ids[x], c.face_ids[y]
                        ));
                    } else if in_dual_cone(d, a, b) || in_dual_cone(-d, a, b) {
                        failures.push(format!(
                            "`{vid}`: slope difference {} of `{}` and `{}` lies in the dual cone of `{}` up to sign (condition 2)",
                            d, c.face_ids[x], c.face_ids[y], c.base.faces[f]
                        ));
                    }
                }
            }
        }
        // condition 1 on rays: the restrictions to the lifts of each ray differ
        let cs = &c.corners[vl];
        let mut on_ray: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        for x in cs {
            on_ray.entry(x.ray).or_default().push(c.slope(vl, x.face).dot(fan.rays[x.ray]));
        }
        for (ray, vals) in on_ray {
            let set: BTreeSet<i64> = vals.iter().copied().collect();
            if set.len() != vals.len() {
                failures.push(format!(
                    "`{vid}`: two lifts of the ray along `{}` carry the same function (condition 1)",
                    c.base.edges[fan.ray_edges[ray]]
                ));
            }
        }
    }
    ClassCReport { holds: failures.is_empty(), failures }
}

/// Every 2-cell has an even number of branch vertices; returns the offenders.
pub fn condition_e_failures(cx: &Complex, branch: &[bool]) -> Vec<usize> {
    (0..cx.faces.len()).filter(|&f| cx.face_verts[f].iter().filter(|&&v| branch[v]).count() % 2 == 1).collect()
}

pub fn check_condition_e(cx: &Complex, branch: &[bool]) -> bool {
    condition_e_failures(cx, branch).is_empty()
}

fn lift_id(base: &str, k: usize) -> String {
    format!("{base}#{k}")
}

/// Monodromy ε ∈ GF(2) on edges with Σ_{E ∋ v} ε_E = [v ∈ S]: ε vanishes off a
/// BFS spanning tree and tree edges are fixed by peeling leaves.
pub fn solve_monodromy(cx: &Complex, branch: &[bool]) -> Result<Vec<u8>> {
    let nv = cx.verts.len();
    let mut parent_edge = vec![usize::MAX; nv];
    let mut order = vec![0];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut q = VecDeque::from([0]);
    while let Some(u) = q.pop_front() {
        for e in cx.vertex_edges(u) {
            let w = cx.other_end(e, u);
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = e;
                order.push(w);
                q.push_back(w);
            }
        }
    }
    let mut eps = vec![0u8; cx.edges.len()];
    let mut need: Vec<u8> = branch.iter().map(|&b| b as u8).collect();
    for &u in order.iter().skip(1).rev() {
        let e = parent_edge[u];
        eps[e] = need[u];
        let p = cx.other_end(e, u);
        need[p] ^= eps[e];
        need[u] = 0;
    }
    if need[0] != 0 {
        return Err(Error::NoSolution("odd number of branch vertices: no monodromy exists".into()));
    }
    Ok(eps)
}

/// Connected double cover branched exactly at `branch`, with φ_{m,n} at the
/// ramification points and φ_m, φ_n sheets elsewhere.
pub fn build_double_cover(cx: &Complex, branch: &[bool], m: i64, n: i64) -> Result<MultiSectionDoc> {
    if m == n {
        return pre("m and n must differ");
    }
    if !cx.has_fans() {
        return pre("base carries no fan data");
    }
    let ns = branch.iter().filter(|&&b| b).count();
    if ns < 2 || ns % 2 != 0 {
        return pre(format!("branch set has {ns} vertices; an even number ≥ 2 is required"));
    }
    let bad = condition_e_failures(cx, branch);
    if let Some(&f) = bad.first() {
        return pre(format!("condition (E) fails on `{}`", cx.faces[f]));
    }
    let eps = solve_monodromy(cx, branch)?;
    let (nv, ne, nf) = (cx.verts.len(), cx.edges.len(), cx.faces.len());
    // edge lift (e, k) joins face lifts (left, k) and (right, k ⊕ ε)
    let face_of_elift = |e: usize, k: usize, side: usize| if side == 0 { k } else { k ^ eps[e] as usize };
    let elift_from_face = |e: usize, f: usize, k: usize| if cx.edge_faces[e][0] == f { k } else { k ^ eps[e] as usize };
    // corner cycles at each vertex: (face, k) → vertex lift number
    let mut vlift_of: HashMap<(usize, usize, usize), usize> = HashMap::new(); // (v, f, k)
    let mut nlifts = vec![0usize; nv];
    for v in 0..nv {
        let around = cx.faces_around(v);
        for k0 in 0..2 {
            if vlift_of.contains_key(&(v, around[0], k0)) {
                continue;
            }
            let id = nlifts[v];
            nlifts[v] += 1;
            let (mut f, mut k) = (around[0], k0);
            loop {
                vlift_of.insert((v, f, k), id);
                let (inc, _) = cx.corner_edges(f, v).unwrap();
                let j = elift_from_face(inc, f, k);
                let [l, r] = cx.edge_faces[inc];
                let (g, side) = if l == f { (r, 1) } else { (l, 0) };
                f = g;
                k = face_of_elift(inc, j, side);
                if vlift_of.contains_key(&(v, f, k)) {
                    break;
                }
            }
        }
        let expect = if branch[v] { 1 } else { 2 };
        if nlifts[v] != expect {
            return Err(Error::Internal(format!("monodromy at `{}` is wrong", cx.verts[v])));
        }
    }
    // kink labels x(e, k) ∈ {0 → m, 1 → n} as a parity system
    let node = |e: usize, k: usize| 2 * e + k;
    let mut adj: Vec<Vec<(usize, u8)>> = vec![vec![]; 2 * ne];
    let link = |a: usize, b: usize, c: u8, adj: &mut Vec<Vec<(usize, u8)>>| {
        adj[a].push((b, c));
        adj[b].push((a, c));
    };
    for e in 0..ne {
        link(node(e, 0), node(e, 1), 1, &mut adj);
    }
    for f in 0..nf {
        for &v in &cx.face_verts[f] {
            let (inc, out) = cx.corner_edges(f, v).unwrap();
            for k in 0..2 {
                let a = node(inc, elift_from_face(inc, f, k));
                let b = node(out, elift_from_face(out, f, k));
                link(a, b, branch[v] as u8, &mut adj);
            }
        }
    }
    let mut x: Vec<Option<u8>> = vec![None; 2 * ne];
    for s in 0..2 * ne {
        if x[s].is_some() {
            continue;
        }
        x[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(a) = q.pop_front() {
            for &(b, c) in &adj[a] {
                let want = x[a].unwrap() ^ c;
                match x[b] {
                    None => {
                        x[b] = Some(want);
                        q.push_back(b);
                    }
                    Some(got) if got != want => {
                        return Err(Error::NoSolution(format!(
                            "kink labels are inconsistent around edge `{}`",
                            cx.edges[b / 2]
                        )));
                    }
                    _ => {}
                }
            }
        }
    }
    let kink_of = |e: usize, j: usize| if x[node(e, j)] == Some(0) { -m } else { -n };
    // documents
    let mut lifts = vec![];
    for v in 0..nv {
        for i in 0..nlifts[v] {
            lifts.push(LiftDoc { id: lift_id(&cx.verts[v], i), base: cx.verts[v].clone(), faces: vec![] });
        }
    }
    for e in 0..ne {
        let [a, b] = cx.edge_ends[e];
        for j in 0..2 {
            let fl = cx.edge_faces[e][0];
            let ends = [a, b].map(|v| lift_id(&cx.verts[v], vlift_of[&(v, fl, j)]));
            lifts.push(LiftDoc { id: lift_id(&cx.edges[e], j), base: cx.edges[e].clone(), faces: ends.to_vec() });
        }
    }
    for f in 0..nf {
        for k in 0..2 {
            let es = cx.face_edges[f].iter().map(|&e| lift_id(&cx.edges[e], elift_from_face(e, f, k))).collect();
            lifts.push(LiftDoc { id: lift_id(&cx.faces[f], k), base: cx.faces[f].clone(), faces: es });
        }
    }
    let mut matchings = vec![];
    for e in 0..ne {
        for side in 0..2 {
            let f = cx.edge_faces[e][side];
            let pairs = (0..2)
                .map(|j| [lift_id(&cx.edges[e], j), lift_id(&cx.faces[f], face_of_elift(e, j, side))])
                .collect();
            matchings.push(MatchingDoc { edge: cx.edges[e].clone(), face: cx.faces[f].clone(), pairs });
        }
    }
    // slopes: walk each vertex lift from its smallest face lift, zero there
    let mut slopes = vec![];
    for v in 0..nv {
        let fan = &cx.fans[v];
        let around = cx.faces_around(v);
        for id in 0..nlifts[v] {
            let mut corners: Vec<(usize, usize)> = vec![];
            for &f in &around {
                for k in 0..2 {
                    if vlift_of[&(v, f, k)] == id {
                        corners.push((f, k));
                    }
                }
            }
            let &(f0, k0) = corners.iter().min_by_key(|(f, k)| (cx.faces[*f].clone(), *k)).unwrap();
            let (mut f, mut k) = (f0, k0);
            let mut s = V2::ZERO;
            loop {
                slopes.push(SlopeDoc {
                    vertex: lift_id(&cx.verts[v], id),
                    face: lift_id(&cx.faces[f], k),
                    m: s.0,
                });
                let (inc, _) = cx.corner_edges(f, v).unwrap();
                let j = elift_from_face(inc, f, k);
                let ray = fan.rays[fan.ray_of_edge(inc).unwrap()];
                s = s + kink_step(ray, kink_of(inc, j));
                let [l, r] = cx.edge_faces[inc];
                let (g, side) = if l == f { (r, 1) } else { (l, 0) };
                f = g;
                k = face_of_elift(inc, j, side);
                if (f, k) == (f0, k0) {
                    if !s.is_zero() {
                        return Err(Error::NoSolution(format!(
                            "slopes do not close up around `{}`",
                            lift_id(&cx.verts[v], id)
                        )));
                    }
                    break;
                }
            }
        }
    }
    let ramification = (0..nv)
        .filter(|&v| branch[v])
        .map(|v| RamificationDoc { vertex: cx.verts[v].clone(), cycles: vec![vec![1, 2]] })
        .collect();
    let d = &cx.doc;
    Ok(MultiSectionDoc {
        schema: MULTISECTION_V1.into(),
        cells: d.cells.clone(),
        fans: d.fans.clone(),
        orientation: d.orientation.clone(),
        asserted: d.asserted.clone(),
        genus: d.genus,
        tags: d.tags.clone(),
        degree: 2,
        lifts,
        matchings,
        branch: (0..nv).filter(|&v| branch[v]).map(|v| cx.verts[v].clone()).collect(),
        ramification,
        slopes,
        label: format!("double cover with local model ({m},{n})"),
    })
}

/// Re-slope one vertex lift so that walking its corners meets the given kinks.
pub fn reslope_by_kinks(doc: &mut MultiSectionDoc, c: &Cover, vl: usize, kinks: &[i64]) -> Result<()> {
    let cs = &c.corners[vl];
    if kinks.len() != cs.len() {
        return pre("one kink per corner is required");
    }
    let fan = &c.base.fans[c.vert_base[vl]];
    let mut s = V2::ZERO;
    let mut new = HashMap::new();
    for (i, x) in cs.iter().enumerate() {
        new.insert(c.face_ids[x.face].clone(), s);
        s = s + kink_step(fan.rays[x.ray], kinks[i]);
    }
    if !s.is_zero() {
        return Err(Error::NoSolution("kinks do not close up".into()));
    }
    let vid = &c.vert_ids[vl];
    for sd in doc.slopes.iter_mut().filter(|sd| &sd.vertex == vid) {
        sd.m = new[&sd.face].0;
    }
    Ok(())
}

/// Sanity helper used by the generators: the fan at v has positive turning.
pub fn fan_is_ccw(cx: &Complex, v: usize) -> bool {
    let r = &cx.fans[v].rays;
    (0..r.len()).all(|i| det(r[i], r[(i + 1) % r.len()]) > 0)
}
