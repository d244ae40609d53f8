//! Closed gluing data, the triple cocycle on the order complex of L, its
//! obstruction class in H²(L, ℚ×) with splitting constants, and holonomy
//! around minimal cycles.
//!
//! ℂ× is modelled by ℚ×. On a surface only vertex → edge flags carry data:
//! the quotient lattice of a 2-cell is zero, so every other flag value is
//! trivial and the cocycle condition holds automatically.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::affine_complex::{CellRef, Complex, ValidationReport};
use crate::cover::Cover;
use crate::error::{pre, Error, Result};
use crate::lattice::V2;
use crate::linalg::{fmt_q, parse_q, qpow, Q};
use crate::schema::{FactorDoc, GluingDoc, GluingEntryDoc, GLUING_V1};

/// Formal product ∏ q_i^{v_i} in 𝒬 ⊗ ℚ× for a quotient lattice of given rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElement {
    pub rank: usize,
    pub factors: Vec<(Vec<i64>, Q)>,
}

impl TorusElement {
    pub fn trivial(rank: usize) -> Self {
        TorusElement { rank, factors: vec![] }
    }
    pub fn single(v: Vec<i64>, q: Q) -> Self {
        TorusElement { rank: v.len(), factors: vec![(v, q)] }.canonical()
    }
    /// Merges equal lattice vectors and drops trivial factors.
    pub fn canonical(mut self) -> Self {
        let mut map: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
        for (v, q) in self.factors.drain(..) {
            if v.iter().all(|&x| x == 0) || q.is_one() {
                continue;
            }
            let e = map.entry(v).or_insert_with(Q::one);
            *e = &*e * q;
        }
        self.factors = map.into_iter().filter(|(_, q)| !q.is_one()).collect();
        self
    }
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.rank != o.rank {
            return pre(format!("rank {} times rank {}", self.rank, o.rank));
        }
        let mut f = self.factors.clone();
        f.extend(o.factors.iter().cloned());
        Ok(TorusElement { rank: self.rank, factors: f }.canonical())
    }
    pub fn inv(&self) -> Self {
        TorusElement { rank: self.rank, factors: self.factors.iter().map(|(v, q)| (v.clone(), q.recip())).collect() }
    }
    /// ∏ q_i^{⟨m, v_i⟩}.
    pub fn evaluate(&self, m: &[i64]) -> Result<Q> {
        if m.len() != self.rank {
            return pre(format!("covector of rank {} against element of rank {}", m.len(), self.rank));
        }
        let mut out = Q::one();
        for (v, q) in &self.factors {
            let e: i64 = v.iter().zip(m).map(|(a, b)| a * b).sum();
            out *= qpow(q, e);
        }
        Ok(out)
    }
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
    fn to_doc(&self) -> Vec<FactorDoc> {
        self.factors.iter().map(|(v, q)| FactorDoc { vec: v.clone(), q: fmt_q(q) }).collect()
    }
}

/// s_{v→E} per (vertex, edge) of the base; missing flags are trivial.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GluingData {
    pub ve: HashMap<(usize, usize), TorusElement>,
    pub open_induced: bool,
}

fn rank_of(c: CellRef) -> usize {
    2 - c.dim() as usize
}

/// Checks ranks, flag existence and nonzero values; with only v → E values
/// present this is the full cocycle condition on a surface.
pub fn validate_gluing(cx: &Complex, doc: &GluingDoc) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let _ = parse_gluing_data(cx, doc, &mut rep);
    rep
}

fn parse_gluing_data(cx: &Complex, doc: &GluingDoc, rep: &mut ValidationReport) -> GluingData {
    if doc.schema != GLUING_V1 {
        rep.push(format!("schema `{}` is not {GLUING_V1}", doc.schema));
    }
    let mut g = GluingData { ve: HashMap::new(), open_induced: doc.open_induced };
    for entry in &doc.entries {
        let [src, dst] = &entry.flag;
        let (a, b) = match (cx.lookup(src), cx.lookup(dst)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                rep.push(format!("flag (`{src}`, `{dst}`) names an unknown cell"));
                continue;
            }
        };
        if a == b || !cx.is_face_of(a, b) {
            rep.push(format!("(`{src}`, `{dst}`) is not a flag τ → σ with τ ≠ σ"));
            continue;
        }
        let rank = rank_of(b);
        let mut el = TorusElement::trivial(rank);
        let mut ok = true;
        for f in &entry.element {
            let Some(q) = parse_q(&f.q) else {
                rep.push(format!("flag (`{src}`, `{dst}`): `{}` is not a rational", f.q));
                ok = false;
                continue;
            };
            if q.is_zero() {
                rep.push(format!("flag (`{src}`, `{dst}`): zero value"));
                ok = false;
            } else if f.vec.len() != rank {
                rep.push(format!(
                    "flag (`{src}`, `{dst}`): vector of length {} in a rank-{rank} quotient",
                    f.vec.len()
                ));
                ok = false;
            } else {
                el.factors.push((f.vec.clone(), q));
            }
        }
        let el = el.canonical();
        if rank == 0 && !entry.element.is_empty() {
            rep.push(format!("flag (`{src}`, `{dst}`): nonzero element in rank-0 quotient"));
            continue;
        }
        if !ok {
            continue;
        }
        if let (CellRef::V(v), CellRef::E(e)) = (a, b) {
            if g.ve.insert((v, e), el).is_some() {
                rep.push(format!("flag (`{src}`, `{dst}`) given twice"));
            }
        }
    }
    g
}

impl GluingData {
    pub fn from_doc(cx: &Complex, doc: &GluingDoc) -> std::result::Result<GluingData, ValidationReport> {
        let mut rep = ValidationReport::default();
        let g = parse_gluing_data(cx, doc, &mut rep);
        if rep.is_ok() {
            Ok(g)
        } else {
            Err(rep)
        }
    }
    pub fn to_doc(&self, cx: &Complex) -> GluingDoc {
        let mut keys: Vec<&(usize, usize)> = self.ve.keys().collect();
        keys.sort_by_key(|(v, e)| (cx.verts[*v].clone(), cx.edges[*e].clone()));
        let entries = keys
            .into_iter()
            .filter(|k| !self.ve[k].is_trivial())
            .map(|&(v, e)| GluingEntryDoc { flag: [cx.verts[v].clone(), cx.edges[e].clone()], element: self.ve[&(v, e)].to_doc() })
            .collect();
        GluingDoc { schema: GLUING_V1.into(), entries, open_induced: self.open_induced }
    }
    pub fn get(&self, v: usize, e: usize) -> TorusElement {
        self.ve.get(&(v, e)).cloned().unwrap_or_else(|| TorusElement::trivial(1))
    }
    /// s_{v→E} = t_E · proj_E(t_v)⁻¹ for a 0-cochain t (t_v of rank 2, t_E of rank 1).
    pub fn coboundary(cx: &Complex, tv: &[TorusElement], te: &[TorusElement]) -> Result<GluingData> {
        let mut ve = HashMap::new();
        for e in 0..cx.edges.len() {
            for &v in &cx.edge_ends[e] {
                let proj = project_to_edge(cx, v, e, &tv[v])?;
                ve.insert((v, e), te[e].mul(&proj.inv())?);
            }
        }
        Ok(GluingData { ve, open_induced: true })
    }
}

/// 𝒬_v ⊗ ℚ× → 𝒬_E ⊗ ℚ× along e.
pub fn project_to_edge(cx: &Complex, v: usize, e: usize, t: &TorusElement) -> Result<TorusElement> {
    if t.rank != 2 {
        return pre("vertex elements have rank 2");
    }
    let mut f = vec![];
    for (x, q) in &t.factors {
        f.push((vec![cx.project_to_edge(v, e, V2::new(x[0], x[1]))?], q.clone()));
    }
    Ok(TorusElement { rank: 1, factors: f }.canonical())
}

/// Barycentric subdivision of L: nodes are cells (vertex lifts, then edge
/// lifts, then face lifts), 1-simplices are strict inclusions and triangles
/// are full flags (v', E', F').
#[derive(Clone, Debug)]
pub struct OrderComplex {
    pub n_nodes: usize,
    pub simplices1: Vec<(usize, usize)>,
    /// per triangle: (v', E', F') as cover indices and its 1-simplices
    /// [vE, EF, vF]
    pub triangles: Vec<Flag3>,
    index1: HashMap<(usize, usize), usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flag3 {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub edges: [usize; 3],
    /// +1 when the flag agrees with the orientation of L
    pub sign: i8,
}

impl OrderComplex {
    pub fn new(c: &Cover) -> OrderComplex {
        let (nv, ne) = (c.vert_ids.len(), c.edge_ids.len());
        let node_e = |e: usize| nv + e;
        let node_f = |f: usize| nv + ne + f;
        let mut simplices1 = vec![];
        let mut index1 = HashMap::new();
        let mut add = |a: usize, b: usize, s: &mut Vec<(usize, usize)>| -> usize {
            *index1.entry((a, b)).or_insert_with(|| {
                s.push((a, b));
                s.len() - 1
            })
        };
        let mut triangles = vec![];
        for (fi, lf) in c.faces.iter().enumerate() {
            let k = lf.edges.len();
            for i in 0..k {
                let el = lf.edges[i];
                // edge i runs from verts[i] to verts[i+1] in the ccw boundary
                for (tail, vl) in [(true, lf.verts[i]), (false, lf.verts[(i + 1) % k])] {
                    let ve = add(vl, node_e(el), &mut simplices1);
                    let ef = add(node_e(el), node_f(fi), &mut simplices1);
                    let vf = add(vl, node_f(fi), &mut simplices1);
                    triangles.push(Flag3 { v: vl, e: el, f: fi, edges: [ve, ef, vf], sign: if tail { 1 } else { -1 } });
                }
            }
        }
        OrderComplex { n_nodes: nv + ne + c.face_ids.len(), simplices1, triangles, index1 }
    }
    pub fn simplex1(&self, a: usize, b: usize) -> Option<usize> {
        self.index1.get(&(a, b)).copied()
    }
}

/// δk(v,E,F) = k(E,F)·k(v,E)/k(v,F).
pub fn coboundary_of(oc: &OrderComplex, k: &[Q]) -> Vec<Q> {
    oc.triangles.iter().map(|t| &k[t.edges[1]] * &k[t.edges[0]] / &k[t.edges[2]]).collect()
}

/// Quotient slope m_E(F') of the face lift F' along the base edge under E',
/// read in the chart of the endpoint lift over the smaller base endpoint.
/// Errors if the two endpoints disagree on the kink of E' (the value would
/// then depend on the chart beyond a shift shared by both sides).
pub fn quotient_slopes(c: &Cover) -> Result<HashMap<(usize, usize), i64>> {
    let mut out = HashMap::new();
    for (el, le) in c.edges.iter().enumerate() {
        let e = le.base;
        let mut vals = [[0i64; 2]; 2];
        for s in 0..2 {
            let vl = le.ends[s];
            let v = c.vert_base[vl];
            for side in 0..2 {
                vals[s][side] = c.base.quotient_slope_at(v, e, c.slope(vl, le.faces[side]))?;
            }
        }
        if vals[0][0] - vals[0][1] != vals[1][0] - vals[1][1] {
            return Err(Error::Invalid(format!(
                "triple cocycle depends on the chart along edge lift `{}`: quotient slopes differ by {} and {}",
                c.edge_ids[el],
                vals[0][0] - vals[0][1],
                vals[1][0] - vals[1][1]
            )));
        }
        for side in 0..2 {
            out.insert((el, le.faces[side]), vals[0][side]);
        }
    }
    Ok(out)
}

/// s(v',E',F') = s_{v→E}(m_E(F')); the E→F and v→F factors are trivial.
pub fn triple_cocycle(c: &Cover, g: &GluingData, oc: &OrderComplex) -> Result<Vec<Q>> {
    let ms = quotient_slopes(c)?;
    oc.triangles
        .iter()
        .map(|t| {
            let v = c.vert_base[t.v];
            let e = c.edges[t.e].base;
            g.get(v, e).evaluate(&[ms[&(t.e, t.f)]])
        })
        .collect()
}

/// Signed product of a 2-cochain over the oriented triangles: its class in
/// H²(L, ℚ×) ≅ ℚ×.
pub fn signed_product(oc: &OrderComplex, c: &[Q]) -> Q {
    let mut out = Q::one();
    for (t, x) in oc.triangles.iter().zip(c) {
        if t.sign > 0 {
            out *= x;
        } else {
            out /= x;
        }
    }
    out
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    match (u64::try_from(a), u64::try_from(b)) {
        (Ok(x), Ok(y)) => BigInt::from(x.gcd(&y)),
        _ => a.gcd(b),
    }
}

/// Pairwise coprime integers > 1 such that every input factors over them.
pub fn coprime_base(values: &[BigInt]) -> Vec<BigInt> {
    let one = BigInt::one();
    let mut inputs: Vec<BigInt> = values.iter().map(|x| x.abs()).filter(|x| *x > one).collect();
    inputs.sort();
    inputs.dedup();
    // insert one value at a time; a shared factor g splits (b, x) into g, b/g, x/g
    let mut base: Vec<BigInt> = vec![];
    for x in inputs {
        let mut pending = vec![x];
        while let Some(x) = pending.pop() {
            if x <= one {
                continue;
            }
            match base.iter().position(|b| !gcd(b, &x).is_one()) {
                Some(i) => {
                    let b = base.swap_remove(i);
                    let g = gcd(&b, &x);
                    pending.extend([&b / &g, &x / &g, g]);
                }
                None => base.push(x),
            }
        }
    }
    base.sort();
    base
}

/// A value of ℚ× as (sign bit, exponents over a coprime base).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coords {
    pub sign: u8,
    pub exps: Vec<i64>,
}

impl Coords {
    fn zero(n: usize) -> Self {
        Coords { sign: 0, exps: vec![0; n] }
    }
    fn add(&self, o: &Self, k: i64) -> Self {
        Coords {
            sign: self.sign ^ ((k.rem_euclid(2) as u8) & o.sign),
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + k * b).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.sign == 0 && self.exps.iter().all(|&x| x == 0)
    }
}

fn factor_int(mut x: BigInt, base: &[BigInt], exps: &mut [i64], sgn: i64) -> Result<()> {
    for (i, p) in base.iter().enumerate() {
        while (&x % p).is_zero() {
            x /= p;
            exps[i] += sgn;
        }
    }
    if x.abs() != BigInt::one() {
        return Err(Error::Internal("value does not factor over the coprime base".into()));
    }
    Ok(())
}

pub fn to_coords(x: &Q, base: &[BigInt]) -> Result<Coords> {
    if x.is_zero() {
        return pre("zero is not in ℚ×");
    }
    let mut exps = vec![0; base.len()];
    factor_int(x.numer().clone(), base, &mut exps, 1)?;
    factor_int(x.denom().clone(), base, &mut exps, -1)?;
    Ok(Coords { sign: x.is_negative() as u8, exps })
}

pub fn from_coords(c: &Coords, base: &[BigInt]) -> Q {
    let (mut num, mut den) = (BigInt::one(), BigInt::one());
    for (p, &e) in base.iter().zip(&c.exps) {
        if e > 0 {
            num *= num_traits::pow(p.clone(), e as usize);
        } else if e < 0 {
            den *= num_traits::pow(p.clone(), e.unsigned_abs() as usize);
        }
    }
    if c.sign == 1 {
        num = -num;
    }
    // the base is pairwise coprime, so num/den is already reduced
    Q::new_raw(num, den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Obstruction {
    Trivial {
        #[serde(skip)]
        k: Vec<Q>,
        tree_edges: usize,
    },
    Nontrivial {
        #[serde(serialize_with = "ser_q")]
        witness: Q,
    },
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(q))
}

impl Obstruction {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Obstruction::Trivial { .. })
    }
}

/// Decide whether c = δk. Tree–cotree elimination: k = 1 on a BFS spanning
/// tree T of the 1-skeleton and on the 2g edges outside T and the dual tree;
/// dual-tree edges are solved leaf first with pivots ±1 in every coordinate.
/// What is left at the root triangle is the obstruction.
pub fn obstruction_class(oc: &OrderComplex, c: &[Q]) -> Result<Obstruction> {
    if c.len() != oc.triangles.len() {
        return pre("cochain length does not match the triangles");
    }
    let mut ints = vec![];
    for x in c {
        ints.push(x.numer().clone());
        ints.push(x.denom().clone());
    }
    let base = coprime_base(&ints);
    let cc: Vec<Coords> = c.iter().map(|x| to_coords(x, &base)).collect::<Result<_>>()?;
    let n1 = oc.simplices1.len();
    // spanning tree of the 1-skeleton
    let mut adj = vec![vec![]; oc.n_nodes];
    for (i, &(a, b)) in oc.simplices1.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut in_tree = vec![false; n1];
    let mut seen = vec![false; oc.n_nodes];
    let mut q = VecDeque::from([0]);
    seen[0] = true;
    while let Some(a) = q.pop_front() {
        for &(b, i) in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                in_tree[i] = true;
                q.push_back(b);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return pre("L is disconnected");
    }
    // dual tree across non-tree 1-simplices
    let mut cof = vec![vec![]; n1];
    for (t, tr) in oc.triangles.iter().enumerate() {
        for &s in &tr.edges {
            cof[s].push(t);
        }
    }
    if cof.iter().any(|x| x.len() != 2) {
        return Err(Error::Internal("order complex is not a closed surface".into()));
    }
    let nt = oc.triangles.len();
    let mut parent_edge = vec![usize::MAX; nt];
    let mut order = vec![0];
    let mut tseen = vec![false; nt];
    tseen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let t = order[i];
        i += 1;
        for &s in &oc.triangles[t].edges {
            if in_tree[s] {
                continue;
            }
            let u = if cof[s][0] == t { cof[s][1] } else { cof[s][0] };
            if !tseen[u] {
                tseen[u] = true;
                parent_edge[u] = s;
                order.push(u);
            }
        }
    }
    let coef = |t: usize, s: usize| -> i64 {
        let e = &oc.triangles[t].edges;
        if s == e[0] || s == e[1] {
            1
        } else {
            -1
        }
    };
    let nb = base.len();
    let mut is_parent = vec![false; n1];
    for &s in parent_edge.iter().filter(|&&s| s != usize::MAX) {
        is_parent[s] = true;
    }
    let mut k: Vec<Option<Coords>> = (0..n1)
        .map(|s| if in_tree[s] || !is_parent[s] { Some(Coords::zero(nb)) } else { None })
        .collect();
    for &t in order.iter().skip(1).rev() {
        let pe = parent_edge[t];
        // c = Σ coef·k; solve for k[pe]
        let mut rest = cc[t].clone();
        for &s in &oc.triangles[t].edges {
            if s != pe {
                let ks = k[s].as_ref().ok_or_else(|| Error::Internal("peeling order broken".into()))?;
                rest = rest.add(ks, -coef(t, s));
            }
        }
        let a = coef(t, pe);
        let val = Coords::zero(nb).add(&rest, a);
        k[pe] = Some(val);
    }
    let root = order[0];
    let mut residual = cc[root].clone();
    for &s in &oc.triangles[root].edges {
        residual = residual.add(k[s].as_ref().unwrap(), -coef(root, s));
    }
    // signed product, summed in coordinates to keep the numbers small
    let total = oc.triangles.iter().zip(&cc).fold(Coords::zero(nb), |acc, (t, x)| acc.add(x, t.sign as i64));
    let witness = from_coords(&total, &base);
    if residual.is_zero() != witness.is_one() {
        return Err(Error::Internal("peeling residual and signed product disagree".into()));
    }
    if !residual.is_zero() {
        return Ok(Obstruction::Nontrivial { witness });
    }
    let k: Vec<Q> = k.into_iter().map(|x| from_coords(&x.unwrap(), &base)).collect();
    if coboundary_of(oc, &k) != c {
        return Err(Error::Internal("recovered splitting does not reproduce the cochain".into()));
    }
    Ok(Obstruction::Trivial { k, tree_edges: in_tree.iter().filter(|&&x| x).count() })
}

/// Same decision through a dense Smith normal form over ℤ per prime
/// coordinate and elimination over GF(2) for the sign. Small complexes only.
pub fn obstruction_dense(oc: &OrderComplex, c: &[Q]) -> Result<Option<Vec<Q>>> {
    let mut ints = vec![];
    for x in c {
        ints.push(x.numer().clone());
        ints.push(x.denom().clone());
    }
    let base = coprime_base(&ints);
    let cc: Vec<Coords> = c.iter().map(|x| to_coords(x, &base)).collect::<Result<_>>()?;
    let n1 = oc.simplices1.len();
    let mut a = vec![vec![0i128; n1]; oc.triangles.len()];
    let mut a2 = vec![vec![0u8; n1]; oc.triangles.len()];
    for (t, tr) in oc.triangles.iter().enumerate() {
        a[t][tr.edges[0]] += 1;
        a[t][tr.edges[1]] += 1;
        a[t][tr.edges[2]] -= 1;
        for &s in &tr.edges {
            a2[t][s] ^= 1;
        }
    }
    let mut k = vec![Coords::zero(base.len()); n1];
    for p in 0..base.len() {
        let b: Vec<i128> = cc.iter().map(|x| x.exps[p] as i128).collect();
        let Some(x) = crate::snf::solve_integer(&a, &b)? else { return Ok(None) };
        for s in 0..n1 {
            k[s].exps[p] = i64::try_from(x[s]).map_err(|_| Error::Internal("exponent overflow".into()))?;
        }
    }
    let b2: Vec<u8> = cc.iter().map(|x| x.sign).collect();
    let Some(x2) = crate::snf::solve_gf2(&a2, &b2) else { return Ok(None) };
    for s in 0..n1 {
        k[s].sign = x2[s];
    }
    Ok(Some(k.iter().map(|x| from_coords(x, &base)).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Holonomy {
    #[serde(serialize_with = "ser_q")]
    pub value: Q,
    /// c_v per base vertex of the cycle, in boundary order
    pub constants: Vec<(String, String)>,
    /// per edge of the cycle: (edge, f_E at its tail, f_E at its head)
    pub frames: Vec<(String, String, String)>,
}

/// Frame ratios along the boundary of base face `face` (all of whose
/// vertices are unramified, degree 2). Returns the holonomy and, when it is
/// 1, constants c_v with c_v·f_E(v) = c_{v'}·f_E(v') on every edge.
pub fn holonomy_with_k(c: &Cover, g: &GluingData, oc: &OrderComplex, k: &[Q], face: usize) -> Result<Holonomy> {
    let b = &c.base;
    if c.degree != 2 {
        return pre("holonomy is defined for rank 2");
    }
    let lifts = &c.flifts[face];
    let (fa, fb) = (lifts[0], lifts[1]);
    let ms = quotient_slopes(c)?;
    let kval = |a: usize, bnode: usize| -> Result<Q> {
        let s = oc.simplex1(a, bnode).ok_or_else(|| Error::Internal("missing 1-simplex".into()))?;
        Ok(k[s].clone())
    };
    let (nv, ne) = (c.vert_ids.len(), c.edge_ids.len());
    let node_e = |e: usize| nv + e;
    let node_f = |f: usize| nv + ne + f;
    let verts = &b.face_verts[face];
    let n = verts.len();
    for &v in verts {
        if c.branch[v] {
            return pre(format!("`{}` is a branch vertex; the cycle is not in G₀", b.verts[v]));
        }
    }
    // C(u) = k(u^β, F^β) / k(u^α, F^α)
    let big_c = |i: usize| -> Result<Q> {
        let (ua, ub) = (c.faces[fa].verts[i], c.faces[fb].verts[i]);
        Ok(kval(ub, node_f(fb))? / kval(ua, node_f(fa))?)
    };
    let f_e = |i: usize, at: usize| -> Result<Q> {
        // edge i of the face, seen from its endpoint `at` (vertex index in the face)
        let e = b.face_edges[face][i];
        let v = verts[at];
        let (ea, eb) = (c.faces[fa].edges[i], c.faces[fb].edges[i]);
        let (ua, ub) = (c.faces[fa].verts[at], c.faces[fb].verts[at]);
        let s = g.get(v, e);
        let num = s.evaluate(&[ms[&(eb, fb)]])? / kval(ub, node_e(eb))?;
        let den = s.evaluate(&[ms[&(ea, fa)]])? / kval(ua, node_e(ea))?;
        Ok(num / den)
    };
    let mut value = Q::one();
    let mut frames = vec![];
    for i in 0..n {
        let (tail, head) = (f_e(i, i)?, f_e(i, (i + 1) % n)?);
        value *= &tail / &head;
        frames.push((b.edges[b.face_edges[face][i]].clone(), fmt_q(&tail), fmt_q(&head)));
    }
    let anchor = big_c(0)?;
    let consts: Vec<Q> = (0..n).map(|i| Ok(big_c(i)? / &anchor)).collect::<Result<_>>()?;
    Ok(Holonomy {
        value,
        constants: verts.iter().zip(&consts).map(|(&v, x)| (b.verts[v].clone(), fmt_q(x))).collect(),
        frames,
    })
}

/// Solve the obstruction for g, then compute the holonomy around ∂face.
pub fn holonomy_around_cycle(c: &Cover, g: &GluingData, face: usize) -> Result<Holonomy> {
    let oc = OrderComplex::new(c);
    let cochain = triple_cocycle(c, g, &oc)?;
    let Obstruction::Trivial { k, .. } = obstruction_class(&oc, &cochain)? else {
        return Err(Error::NoSolution("obstruction class is nontrivial; no splitting constants".into()));
    };
    let h = holonomy_with_k(c, g, &oc, &k, face)?;
    if !h.value.is_one() {
        return Err(Error::Invalid(format!(
            "gluing data inconsistent: holonomy {} around `{}`",
            fmt_q(&h.value),
            c.base.faces[face]
        )));
    }
    Ok(h)
}

/// Checks c_v·f_E(v) = c_{v'}·f_E(v') on every edge of a holonomy record.
pub fn check_certificate(h: &Holonomy) -> bool {
    let n = h.frames.len();
    let parse = |s: &str| parse_q(s).unwrap_or_else(Q::zero);
    (0..n).all(|i| {
        let (cv, cw) = (parse(&h.constants[i].1), parse(&h.constants[(i + 1) % n].1));
        let (ft, fh) = (parse(&h.frames[i].1), parse(&h.frames[i].2));
        !cv.is_zero() && cv * ft == cw * fh
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::cube_o1;
    use crate::linalg::{q, qf};
    use crate::affine_complex::tests::tetrahedron;
    use crate::schema::{LiftDoc, MultiSectionDoc, SlopeDoc, MULTISECTION_V1};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity_cover() -> Cover {
        let cx = Complex::new(&tetrahedron()).unwrap();
        let mut lifts = vec![];
        let mut slopes = vec![];
        for v in &cx.verts {
            lifts.push(LiftDoc { id: format!("{v}'"), base: v.clone(), faces: vec![] });
        }
        for (e, id) in cx.edges.iter().enumerate() {
            let faces = cx.edge_ends[e].iter().map(|&v| format!("{}'", cx.verts[v])).collect();
            lifts.push(LiftDoc { id: format!("{id}'"), base: id.clone(), faces });
        }
        for (f, id) in cx.faces.iter().enumerate() {
            let faces = cx.face_edges[f].iter().map(|&e| format!("{}'", cx.edges[e])).collect();
            lifts.push(LiftDoc { id: format!("{id}'"), base: id.clone(), faces });
            for &v in &cx.face_verts[f] {
                slopes.push(SlopeDoc { vertex: format!("{}'", cx.verts[v]), face: format!("{id}'"), m: [0, 0] });
            }
        }
        let d = &cx.doc;
        Cover::new(&MultiSectionDoc {
            schema: MULTISECTION_V1.into(),
            cells: d.cells.clone(),
            fans: d.fans.clone(),
            orientation: d.orientation.clone(),
            asserted: d.asserted.clone(),
            genus: d.genus,
            tags: vec![],
            degree: 1,
            lifts,
            matchings: vec![],
            branch: vec![],
            ramification: vec![],
            slopes,
            label: String::new(),
        })
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(TorusElement::trivial(2).evaluate(&[3, 5]).unwrap(), q(1));
        assert_eq!(TorusElement::single(vec![1, 0], q(2)).evaluate(&[3, 5]).unwrap(), q(8));
        let t = TorusElement::single(vec![1, 0], q(2)).mul(&TorusElement::single(vec![0, 1], q(3))).unwrap();
        // oracle: 2^1 · 3^1
        assert_eq!(t.evaluate(&[1, 1]).unwrap(), q(2) * q(3));
        assert!(t.evaluate(&[1]).is_err());
    }

    #[test]
    fn order_complex_of_tetrahedron() {
        let c = identity_cover();
        let oc = OrderComplex::new(&c);
        assert_eq!(oc.n_nodes, 14);
        assert_eq!(oc.simplices1.len(), 36);
        assert_eq!(oc.triangles.len(), 24);
        let chi = oc.n_nodes as i64 - oc.simplices1.len() as i64 + oc.triangles.len() as i64;
        assert_eq!(chi, 2);
    }

    #[test]
    fn trivial_cochain_is_trivial() {
        let c = identity_cover();
        let oc = OrderComplex::new(&c);
        let g = GluingData::default();
        let cc = triple_cocycle(&c, &g, &oc).unwrap();
        assert!(cc.iter().all(|x| x.is_one()));
        match obstruction_class(&oc, &cc).unwrap() {
            Obstruction::Trivial { k, .. } => assert!(k.iter().all(|x| x.is_one())),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn planted_value_gives_witness() {
        let c = identity_cover();
        let oc = OrderComplex::new(&c);
        let mut cc = vec![q(1); oc.triangles.len()];
        cc[5] = q(2);
        let want = if oc.triangles[5].sign > 0 { q(2) } else { qf(1, 2) };
        assert_eq!(signed_product(&oc, &cc), want);
        assert_eq!(obstruction_class(&oc, &cc).unwrap(), Obstruction::Nontrivial { witness: want });
        assert_eq!(obstruction_dense(&oc, &cc).unwrap(), None);
    }

    #[test]
    fn random_coboundaries_solve_both_routes() {
        let c = identity_cover();
        let oc = OrderComplex::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let k: Vec<Q> = (0..oc.simplices1.len())
                .map(|_| {
                    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                    qf(s * rng.gen_range(1..13), rng.gen_range(1..13))
                })
                .collect();
            let cc = coboundary_of(&oc, &k);
            let Obstruction::Trivial { k: k1, .. } = obstruction_class(&oc, &cc).unwrap() else { panic!() };
            assert_eq!(coboundary_of(&oc, &k1), cc);
            let k2 = obstruction_dense(&oc, &cc).unwrap().expect("dense route solves");
            assert_eq!(coboundary_of(&oc, &k2), cc);
        }
    }

    #[test]
    fn coprime_base_refines() {
        let b = coprime_base(&[BigInt::from(12), BigInt::from(18), BigInt::from(35)]);
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                assert!(x.gcd(y).is_one());
            }
        }
        for v in [12, 18, 35] {
            let c = to_coords(&q(v), &b).unwrap();
            assert_eq!(from_coords(&c, &b), q(v));
        }
    }

    #[test]
    fn gluing_doc_validation() {
        let cx = Complex::new(&tetrahedron()).unwrap();
        let mut doc = GluingDoc { schema: GLUING_V1.into(), entries: vec![], open_induced: false };
        assert!(validate_gluing(&cx, &doc).is_ok());
        doc.entries.push(GluingEntryDoc {
            flag: ["a".into(), "fb".into()],
            element: vec![FactorDoc { vec: vec![], q: "2".into() }],
        });
        assert!(validate_gluing(&cx, &doc).contains("nonzero element in rank-0 quotient"));
        doc.entries[0] = GluingEntryDoc { flag: ["a".into(), "bc".into()], element: vec![] };
        assert!(validate_gluing(&cx, &doc).contains("not a flag"));
        doc.entries[0] = GluingEntryDoc {
            flag: ["a".into(), "ab".into()],
            element: vec![FactorDoc { vec: vec![1], q: "0".into() }],
        };
        assert!(validate_gluing(&cx, &doc).contains("zero value"));
    }

    fn random_t(rng: &mut ChaCha8Rng, rank: usize) -> TorusElement {
        let v: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..3)).collect();
        TorusElement::single(v, qf(rng.gen_range(1..7), rng.gen_range(1..7)))
    }

    #[test]
    fn coboundary_gluing_has_trivial_obstruction_and_holonomy() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let cx = &c.base;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tv: Vec<TorusElement> = (0..cx.verts.len()).map(|_| random_t(&mut rng, 2)).collect();
        let te: Vec<TorusElement> = (0..cx.edges.len()).map(|_| random_t(&mut rng, 1)).collect();
        let g = GluingData::coboundary(cx, &tv, &te).unwrap();
        let back = GluingData::from_doc(cx, &g.to_doc(cx)).unwrap();
        assert_eq!(back.ve.iter().filter(|(_, t)| !t.is_trivial()).count(), g.ve.iter().filter(|(_, t)| !t.is_trivial()).count());
        let oc = OrderComplex::new(&c);
        let cc = triple_cocycle(&c, &g, &oc).unwrap();
        assert!(obstruction_class(&oc, &cc).unwrap().is_trivial());
        let faces: Vec<usize> =
            (0..cx.faces.len()).filter(|&f| cx.face_verts[f].iter().all(|&v| !c.branch[v])).collect();
        assert_eq!(faces.len(), 1);
        let h = holonomy_around_cycle(&c, &g, faces[0]).unwrap();
        assert!(h.value.is_one());
        assert!(check_certificate(&h));
    }

    #[test]
    fn corrupted_gluing_breaks_holonomy() {
        let ex = cube_o1("planted", 1, 0).unwrap();
        let c = Cover::new(&ex.section).unwrap();
        let cx = &c.base;
        let g = GluingData::default();
        let oc = OrderComplex::new(&c);
        let Obstruction::Trivial { k, .. } = obstruction_class(&oc, &triple_cocycle(&c, &g, &oc).unwrap()).unwrap()
        else {
            panic!()
        };
        let f = (0..cx.faces.len()).find(|&f| cx.face_verts[f].iter().all(|&v| !c.branch[v])).unwrap();
        let h = holonomy_with_k(&c, &g, &oc, &k, f).unwrap();
        assert!(h.value.is_one());
        assert!(h.constants.iter().all(|(_, x)| x == "1"));
        // break one edge value after k has been fixed
        let mut bad = g.clone();
        let (v, e) = (cx.face_verts[f][0], cx.face_edges[f][0]);
        bad.ve.insert((v, e), TorusElement::single(vec![1], q(5)));
        let h = holonomy_with_k(&c, &bad, &oc, &k, f).unwrap();
        assert!(!h.value.is_one());
    }

    #[test]
    fn slope_shift_changes_cochain_by_a_coboundary() {
        let ex = cube_o1("petrie", 1, 0).unwrap();
        let mut doc = ex.section.clone();
        let c0 = Cover::new(&doc).unwrap();
        let cx = &c0.base;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tv: Vec<TorusElement> = (0..cx.verts.len()).map(|_| random_t(&mut rng, 2)).collect();
        let te: Vec<TorusElement> = (0..cx.edges.len()).map(|_| random_t(&mut rng, 1)).collect();
        let g = GluingData::coboundary(cx, &tv, &te).unwrap();
        let oc = OrderComplex::new(&c0);
        let before = triple_cocycle(&c0, &g, &oc).unwrap();
        let target = doc.slopes[0].vertex.clone();
        for s in doc.slopes.iter_mut().filter(|s| s.vertex == target) {
            s.m = [s.m[0] + 3, s.m[1] - 2];
        }
        let c1 = Cover::new(&doc).unwrap();
        let after = triple_cocycle(&c1, &g, &oc).unwrap();
        assert_ne!(before, after);
        let ratio: Vec<Q> = after.iter().zip(&before).map(|(a, b)| a / b).collect();
        assert!(obstruction_class(&oc, &ratio).unwrap().is_trivial());
    }
}
